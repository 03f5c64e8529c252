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

use std::f64::consts::PI;

use super::{Circuit, Gate, QsimError, Statevector};

/// Textbook QFT on `register` (register[0] is the least significant bit):
/// `|v> -> 2^{-m/2} sum_K e^{2 pi i v K / 2^m} |K>`.
pub fn qft_circuit(n_qubits: usize, register: &[usize]) -> Result<Circuit, QsimError> {
    let mut c = Circuit::new(n_qubits)?;
    let m = register.len();
    for j in (0..m).rev() {
        c.push(Gate::Hadamard(register[j]))?;
        for l in (0..j).rev() {
            c.push(Gate::ControlledPhase {
                controls: vec![register[l]],
                target: register[j],
                angle: PI / (1u64 << (j - l)) as f64,
            })?;
        }
    }
    for i in 0..m / 2 {
        c.push(Gate::Swap(register[i], register[m - 1 - i]))?;
    }
    Ok(c)
}

pub fn inverse_qft_circuit(n_qubits: usize, register: &[usize]) -> Result<Circuit, QsimError> {
    Ok(qft_circuit(n_qubits, register)?.adjoint())
}

pub fn inverse_qft(state: &mut Statevector, register: &[usize]) -> Result<(), QsimError> {
    let c = inverse_qft_circuit(state.n_qubits(), register)?;
    state.apply_circuit(&c)
}

pub fn forward_qft(state: &mut Statevector, register: &[usize]) -> Result<(), QsimError> {
    let c = qft_circuit(state.n_qubits(), register)?;
    state.apply_circuit(&c)
}
