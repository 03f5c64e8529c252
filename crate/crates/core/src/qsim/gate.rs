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

use serde::{Deserialize, Serialize};

use super::QsimError;

/// A single gate of the simulator's native gate set.
///
/// Qubit indices follow the global convention: qubit `q` is bit `q` of the
/// basis-state index (qubit 0 is the least significant bit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Hadamard(usize),
    PauliX(usize),
    PauliZ(usize),
    Swap(usize, usize),
    /// `diag(1, e^{i angle})` on `target`.
    Phase { target: usize, angle: f64 },
    /// Phase rotation on `target` applied only when every control is `|1>`.
    /// Symmetric in all participating qubits; recorded as a `C^dR` gate with
    /// `d = controls.len()`.
    ControlledPhase {
        controls: Vec<usize>,
        target: usize,
        angle: f64,
    },
    /// Sign flip of the basis states where every control and the target are `|1>`.
    MultiControlledZ { controls: Vec<usize>, target: usize },
    /// Two-qubit split block: `CNOT(a->b)`, `C_b Ry(theta)` on `a`, `CNOT(a->b)`
    /// with `qubits = [a, b]`.
    ScsTwo { qubits: [usize; 2], theta: f64 },
    /// Three-qubit split block: `CNOT(a->c)`, `C_{b,c} Ry(theta)` on `a`,
    /// `CNOT(a->c)` with `qubits = [a, b, c]`.
    ScsThree { qubits: [usize; 3], theta: f64 },
}

/// Coarse classification used for gate histograms and resource tallies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Hadamard,
    PauliX,
    PauliZ,
    Swap,
    Phase,
    /// Controlled phase rotation with the given number of controls.
    ControlledPhase(usize),
    MultiControlledZ,
    ScsTwo,
    ScsThree,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Hadamard(_) => GateKind::Hadamard,
            Gate::PauliX(_) => GateKind::PauliX,
            Gate::PauliZ(_) => GateKind::PauliZ,
            Gate::Swap(..) => GateKind::Swap,
            Gate::Phase { .. } => GateKind::Phase,
            Gate::ControlledPhase { controls, .. } => GateKind::ControlledPhase(controls.len()),
            Gate::MultiControlledZ { .. } => GateKind::MultiControlledZ,
            Gate::ScsTwo { .. } => GateKind::ScsTwo,
            Gate::ScsThree { .. } => GateKind::ScsThree,
        }
    }

    /// All qubits the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) | Gate::PauliX(q) | Gate::PauliZ(q) => vec![*q],
            Gate::Phase { target, .. } => vec![*target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::ControlledPhase {
                controls, target, ..
            }
            | Gate::MultiControlledZ { controls, target } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
            Gate::ScsTwo { qubits, .. } => qubits.to_vec(),
            Gate::ScsThree { qubits, .. } => qubits.to_vec(),
        }
    }

    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::Phase { target, angle } => Gate::Phase {
                target: *target,
                angle: -angle,
            },
            Gate::ControlledPhase {
                controls,
                target,
                angle,
            } => Gate::ControlledPhase {
                controls: controls.clone(),
                target: *target,
                angle: -angle,
            },
            // CNOT is self-inverse, so conjugating Ry(-theta) inverts the block.
            Gate::ScsTwo { qubits, theta } => Gate::ScsTwo {
                qubits: *qubits,
                theta: -theta,
            },
            Gate::ScsThree { qubits, theta } => Gate::ScsThree {
                qubits: *qubits,
                theta: -theta,
            },
            g => g.clone(),
        }
    }

    /// True when the gate is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            Gate::PauliZ(_)
                | Gate::Phase { .. }
                | Gate::ControlledPhase { .. }
                | Gate::MultiControlledZ { .. }
        )
    }

    pub(crate) fn validate(&self, n_qubits: usize) -> Result<(), QsimError> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(QsimError::IndexOutOfRange {
                    qubit: q,
                    n_qubits,
                });
            }
        }
        for (i, &a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(&a) {
                return Err(QsimError::ControlTargetOverlap { qubit: a });
            }
        }
        Ok(())
    }
}
