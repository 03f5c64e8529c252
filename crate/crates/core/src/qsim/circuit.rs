// Copyright 2026 The cardgas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Gate, GateKind, QsimError, MAX_QUBITS};

/// An ordered list of gates over a fixed qubit count.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self, QsimError> {
        if n_qubits == 0 {
            return Err(QsimError::NoQubits);
        }
        if n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits {
                requested: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits,
            ops: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self, QsimError> {
        gate.validate(self.n_qubits)?;
        self.ops.push(gate);
        Ok(self)
    }

    /// Appends every gate of `other`. `other` may be narrower than `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self, QsimError> {
        if other.n_qubits > self.n_qubits {
            return Err(QsimError::WidthMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(self)
    }

    /// Same gates on a wider register; qubit indices are unchanged.
    pub fn widened(&self, n_qubits: usize) -> Result<Circuit, QsimError> {
        let mut c = Circuit::new(n_qubits)?;
        c.append(self)?;
        Ok(c)
    }

    /// Relabels qubit `q` to `map[q]` on a register of `n_qubits`.
    pub fn remapped(&self, map: &[usize], n_qubits: usize) -> Result<Circuit, QsimError> {
        let m = |q: usize| -> Result<usize, QsimError> {
            map.get(q).copied().ok_or(QsimError::IndexOutOfRange {
                qubit: q,
                n_qubits: map.len(),
            })
        };
        let mut c = Circuit::new(n_qubits)?;
        for g in &self.ops {
            let mapped = match g {
                Gate::Hadamard(q) => Gate::Hadamard(m(*q)?),
                Gate::PauliX(q) => Gate::PauliX(m(*q)?),
                Gate::PauliZ(q) => Gate::PauliZ(m(*q)?),
                Gate::Swap(a, b) => Gate::Swap(m(*a)?, m(*b)?),
                Gate::Phase { target, angle } => Gate::Phase {
                    target: m(*target)?,
                    angle: *angle,
                },
                Gate::ControlledPhase {
                    controls,
                    target,
                    angle,
                } => Gate::ControlledPhase {
                    controls: controls.iter().map(|&q| m(q)).collect::<Result<_, _>>()?,
                    target: m(*target)?,
                    angle: *angle,
                },
                Gate::MultiControlledZ { controls, target } => Gate::MultiControlledZ {
                    controls: controls.iter().map(|&q| m(q)).collect::<Result<_, _>>()?,
                    target: m(*target)?,
                },
                Gate::ScsTwo { qubits, theta } => Gate::ScsTwo {
                    qubits: [m(qubits[0])?, m(qubits[1])?],
                    theta: *theta,
                },
                Gate::ScsThree { qubits, theta } => Gate::ScsThree {
                    qubits: [m(qubits[0])?, m(qubits[1])?, m(qubits[2])?],
                    theta: *theta,
                },
            };
            c.push(mapped)?;
        }
        Ok(c)
    }

    /// The inverse circuit: reversed order, each gate replaced by its adjoint.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            ops: self.ops.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    pub fn histogram(&self) -> BTreeMap<GateKind, usize> {
        let mut h = BTreeMap::new();
        for g in &self.ops {
            *h.entry(g.kind()).or_insert(0) += 1;
        }
        h
    }

    /// Number of controlled phase rotations keyed by control count.
    pub fn controlled_rotation_counts(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for g in &self.ops {
            if let Gate::ControlledPhase { controls, .. } = g {
                *h.entry(controls.len()).or_insert(0) += 1;
            }
        }
        h
    }

    /// Length of the longest chain of gates sharing qubits (greedy ASAP layering).
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.ops {
            let qs = g.qubits();
            let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }
}
