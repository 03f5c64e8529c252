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

//! Dicke-state preparation from split-and-cyclic-shift blocks, and the
//! reflection about the Dicke state used as the fixed-cardinality diffusion.
//!
//! Positions are counted left to right in ket notation: position `p` of an
//! `n`-qubit register (1-based) is qubit `n - p`. The starting state
//! `|0^{n-k} 1^k>` therefore has its ones on qubits `0..k`.

use thiserror::Error;

use crate::qsim::{Circuit, Gate, QsimError, Statevector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DickeError {
    #[error("invalid split block indices (i = {i}, j = {j}); need i >= 2 and 1 <= j <= i - 1")]
    InvalidIndices { i: usize, j: usize },
    #[error("cardinality k = {k} outside 0..={n}")]
    CardinalityOutOfRange { n: usize, k: usize },
    #[error(transparent)]
    Sim(#[from] QsimError),
}

/// Preparation circuit for `|h_k>` over `n` qubits.
#[derive(Clone, Debug)]
pub struct DickePlan {
    pub n: usize,
    pub k: usize,
    /// Maps `|0^{n-k} 1^k>` to `|h_k>`.
    pub circuit: Circuit,
    /// Register qubits, position 1 first.
    pub layout: Vec<usize>,
}

fn split_angle(l: usize, i: usize) -> f64 {
    2.0 * (l as f64 / i as f64).sqrt().acos()
}

/// Appends the split block `SCS_{i,j}` acting on `positions`
/// (`positions[0]` is the leftmost of the `j + 1` qubits).
fn push_scs(ops: &mut Vec<Gate>, i: usize, j: usize, positions: &[usize]) -> Result<(), DickeError> {
    if i < 2 || j < 1 || j > i - 1 {
        return Err(DickeError::InvalidIndices { i, j });
    }
    debug_assert_eq!(positions.len(), j + 1);
    let p = |idx: usize| positions[idx - 1];
    ops.push(Gate::ScsTwo {
        qubits: [p(j), p(j + 1)],
        theta: split_angle(1, i),
    });
    for l in 2..=j {
        ops.push(Gate::ScsThree {
            qubits: [p(j + 1 - l), p(j + 2 - l), p(j + 1)],
            theta: split_angle(l, i),
        });
    }
    Ok(())
}

fn to_circuit(n: usize, ops: Vec<Gate>) -> Result<Circuit, DickeError> {
    let mut c = Circuit::new(n)?;
    for g in ops {
        c.push(g)?;
    }
    Ok(c)
}

/// `SCS_{i,j}` on its own `j + 1`-qubit register.
///
/// Fixes `|0^{j+1}>` and `|1^{j+1}>` and sends `|0^{j+1-l} 1^l>` to
/// `sqrt(l/i) |0^{j+1-l} 1^l> + sqrt((i-l)/i) |0^{j-l} 1^l 0>`.
pub fn build_scs(i: usize, j: usize) -> Result<Circuit, DickeError> {
    if i < 2 || j < 1 || j > i - 1 {
        return Err(DickeError::InvalidIndices { i, j });
    }
    let width = j + 1;
    let positions: Vec<usize> = (1..=width).map(|p| width - p).collect();
    let mut ops = Vec::new();
    push_scs(&mut ops, i, j, &positions)?;
    to_circuit(width, ops)
}

/// Block sequence of `U_n^k` without the simulator's width cap.
pub fn dicke_gates(n: usize, k: usize) -> Result<Vec<Gate>, DickeError> {
    if k > n || n == 0 {
        return Err(DickeError::CardinalityOutOfRange { n, k });
    }
    let pos = |p: usize| n - p;
    let mut ops = Vec::new();
    if k > 0 && k < n {
        for l in (k + 1..=n).rev() {
            let positions: Vec<usize> = (l - k..=l).map(pos).collect();
            push_scs(&mut ops, l, k, &positions)?;
        }
        for l in (2..=k).rev() {
            let positions: Vec<usize> = (1..=l).map(pos).collect();
            push_scs(&mut ops, l, l - 1, &positions)?;
        }
    }
    Ok(ops)
}

/// Longest chain of blocks sharing a qubit in `U_n^k` (greedy layering).
pub fn dicke_depth(n: usize, k: usize) -> Result<usize, DickeError> {
    let mut level = vec![0usize; n];
    let mut depth = 0;
    for g in dicke_gates(n, k)? {
        let qs = g.qubits();
        let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for q in qs {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    Ok(depth)
}

/// The unitary `U_n^k : |0^{n-k} 1^k> -> |h_k>`. Empty for `k = 0` and `k = n`.
pub fn build_dicke_unitary(n: usize, k: usize) -> Result<DickePlan, DickeError> {
    let circuit = to_circuit(n, dicke_gates(n, k)?)?;
    Ok(DickePlan {
        n,
        k,
        circuit,
        layout: (1..=n).map(|p| n - p).collect(),
    })
}

/// Closed-form `(two_qubit_blocks, three_qubit_blocks)` in `U_n^k`.
pub fn dicke_block_counts(n: usize, k: usize) -> (usize, usize) {
    if k == 0 || k >= n {
        return (0, 0);
    }
    let two = n - 1;
    let three = (k - 1) * (k.saturating_sub(2)) / 2 + (n - k) * (k - 1);
    (two, three)
}

/// Reflection `2|h_k><h_k| - I` up to a global phase, as
/// `U (X on the n-k zero positions) CZ_n (X ...) U^dagger`.
pub fn build_constrained_diffusion(n: usize, k: usize) -> Result<Circuit, DickeError> {
    let plan = build_dicke_unitary(n, k)?;
    let mut c = Circuit::new(n)?;
    c.append(&plan.circuit.adjoint())?;
    // zero positions 1..=n-k are qubits k..n
    for q in k..n {
        c.push(Gate::PauliX(q))?;
    }
    c.push(Gate::MultiControlledZ {
        controls: (0..n - 1).collect(),
        target: n - 1,
    })?;
    for q in k..n {
        c.push(Gate::PauliX(q))?;
    }
    c.append(&plan.circuit)?;
    Ok(c)
}

/// Circuit taking `|0^n>` to `|h_k>`: X on qubits `0..k`, then `U_n^k`.
pub fn constrained_state_prep(n: usize, k: usize) -> Result<Circuit, DickeError> {
    let plan = build_dicke_unitary(n, k)?;
    let mut c = Circuit::new(n)?;
    for q in 0..k {
        c.push(Gate::PauliX(q))?;
    }
    c.append(&plan.circuit)?;
    Ok(c)
}

pub fn prepare_constrained_superposition(n: usize, k: usize) -> Result<Statevector, DickeError> {
    let prep = constrained_state_prep(n, k)?;
    let mut s = Statevector::zero(n)?;
    s.apply_circuit(&prep)?;
    Ok(s)
}
