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

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Circuit, Gate, QsimError, MAX_QUBITS};

const NORM_TOL: f64 = 1e-10;

/// Dense amplitude vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_width(n_qubits: usize) -> Result<(), QsimError> {
    if n_qubits == 0 {
        return Err(QsimError::NoQubits);
    }
    if n_qubits > MAX_QUBITS {
        return Err(QsimError::TooManyQubits {
            requested: n_qubits,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self, QsimError> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QsimError> {
        check_width(n_qubits)?;
        let len = 1usize << n_qubits;
        if index >= len {
            return Err(QsimError::BasisOutOfRange { index, len });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an explicit amplitude vector; length must be a power of two and
    /// the vector normalized within `1e-10`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QsimError::BadLength { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_width(n_qubits)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`; insensitive to global phase.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), QsimError> {
        gate.validate(self.n_qubits)?;
        match gate {
            Gate::Hadamard(q) => self.hadamard(*q),
            Gate::PauliX(q) => self.pauli_x(*q),
            Gate::PauliZ(q) => self.diag_phase(1 << q, Complex64::new(-1.0, 0.0)),
            Gate::Swap(a, b) => self.swap(*a, *b),
            Gate::Phase { target, angle } => {
                self.diag_phase(1 << target, Complex64::from_polar(1.0, *angle))
            }
            Gate::ControlledPhase {
                controls,
                target,
                angle,
            } => {
                let mask = controls.iter().fold(1usize << target, |m, &c| m | (1 << c));
                self.diag_phase(mask, Complex64::from_polar(1.0, *angle))
            }
            Gate::MultiControlledZ { controls, target } => {
                let mask = controls.iter().fold(1usize << target, |m, &c| m | (1 << c));
                self.diag_phase(mask, Complex64::new(-1.0, 0.0))
            }
            Gate::ScsTwo { qubits, theta } => self.local_block(qubits, |v| {
                // local bit 0 = a, bit 1 = b
                cnot(v, 0, 1);
                controlled_ry(v, &[1], 0, *theta);
                cnot(v, 0, 1);
            }),
            Gate::ScsThree { qubits, theta } => self.local_block(qubits, |v| {
                // local bit 0 = a, bit 1 = b, bit 2 = c
                cnot(v, 0, 2);
                controlled_ry(v, &[1, 2], 0, *theta);
                cnot(v, 0, 2);
            }),
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), QsimError> {
        if circuit.n_qubits() > self.n_qubits {
            return Err(QsimError::WidthMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        for g in circuit.ops() {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Multiplies every amplitude whose index contains all bits of `mask` by `phase`.
    fn diag_phase(&mut self, mask: usize, phase: Complex64) {
        let len = self.amps.len();
        let mut i = mask;
        while i < len {
            self.amps[i] *= phase;
            i = (i + 1) | mask;
        }
    }

    /// Multiplies each amplitude by the phase returned for its index.
    pub(crate) fn apply_diagonal(&mut self, mut phase: impl FnMut(usize) -> Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= phase(i);
        }
    }

    fn hadamard(&mut self, q: usize) {
        let bit = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = (a + b) * s;
                self.amps[i | bit] = (a - b) * s;
            }
        }
    }

    fn pauli_x(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ba) | bb);
            }
        }
    }

    /// Gathers the 2^q amplitudes of each block of `qubits`, runs `f` on the
    /// local vector (local bit t = `qubits[t]`) and scatters the result back.
    fn local_block<const Q: usize>(&mut self, qubits: &[usize; Q], f: impl Fn(&mut [Complex64])) {
        let block_mask = qubits.iter().fold(0usize, |m, &q| m | (1 << q));
        let dim = 1usize << Q;
        let offsets: Vec<usize> = (0..dim)
            .map(|l| {
                (0..Q)
                    .filter(|t| l >> t & 1 == 1)
                    .fold(0usize, |o, t| o | (1 << qubits[t]))
            })
            .collect();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & block_mask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base | off];
            }
            f(&mut local);
            for (l, off) in offsets.iter().enumerate() {
                self.amps[base | off] = local[l];
            }
        }
    }

    /// Marginal distribution of `register`; outcome bit j corresponds to `register[j]`.
    pub fn register_probabilities(&self, register: &[usize]) -> Result<Vec<f64>, QsimError> {
        self.check_register(register)?;
        let mut probs = vec![0.0; 1 << register.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[extract(i, register)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Draws one outcome of `register` with Born probabilities. The state is not collapsed.
    pub fn sample_register<R: Rng + ?Sized>(
        &self,
        register: &[usize],
        rng: &mut R,
    ) -> Result<usize, QsimError> {
        let probs = self.register_probabilities(register)?;
        Ok(sample_index(&probs, rng))
    }

    /// One seeded sample of `register`.
    pub fn measure_register(&self, register: &[usize], seed: u64) -> Result<usize, QsimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_register(register, &mut rng)
    }

    /// `shots` seeded samples of `register`, drawn from a single RNG stream.
    pub fn sample_shots(
        &self,
        register: &[usize],
        shots: usize,
        seed: u64,
    ) -> Result<Vec<usize>, QsimError> {
        let probs = self.register_probabilities(register)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..shots).map(|_| sample_index(&probs, &mut rng)).collect())
    }

    fn check_register(&self, register: &[usize]) -> Result<(), QsimError> {
        for (i, &q) in register.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(QsimError::IndexOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
            if register[i + 1..].contains(&q) {
                return Err(QsimError::DuplicateQubit { qubit: q });
            }
        }
        Ok(())
    }
}

/// Reads the bits of `index` at the positions in `register` into a packed integer.
fn extract(index: usize, register: &[usize]) -> usize {
    register
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | ((index >> q & 1) << j))
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_nonzero
}

fn cnot(v: &mut [Complex64], control: usize, target: usize) {
    for l in 0..v.len() {
        if l >> control & 1 == 1 && l >> target & 1 == 0 {
            v.swap(l, l | (1 << target));
        }
    }
}

fn controlled_ry(v: &mut [Complex64], controls: &[usize], target: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let cmask = controls.iter().fold(0usize, |m, &q| m | (1 << q));
    for l in 0..v.len() {
        if l & cmask == cmask && l >> target & 1 == 0 {
            let h = l | (1 << target);
            let (a0, a1) = (v[l], v[h]);
            v[l] = a0 * c - a1 * s;
            v[h] = a0 * s + a1 * c;
        }
    }
}
