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

//! Dense statevector simulator.
//!
//! Gates act in place on the amplitude array via stride/mask arithmetic; no
//! full-size unitary is ever built. Qubit 0 is the least significant bit of
//! a basis-state index.

mod circuit;
mod gate;
mod qft;
mod statevector;

pub use circuit::Circuit;
pub use gate::{Gate, GateKind};
pub use qft::{forward_qft, inverse_qft, inverse_qft_circuit, qft_circuit};
pub use statevector::Statevector;

use thiserror::Error;

/// Hard cap on simulated register width.
pub const MAX_QUBITS: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    IndexOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {qubit} used as both control and target")]
    ControlTargetOverlap { qubit: usize },
    #[error("qubit {qubit} listed twice in a register")]
    DuplicateQubit { qubit: usize },
    #[error("{requested} qubits requested, simulator cap is {cap}")]
    TooManyQubits { requested: usize, cap: usize },
    #[error("a register needs at least one qubit")]
    NoQubits,
    #[error("basis index {index} out of range for dimension {len}")]
    BasisOutOfRange { index: usize, len: usize },
    #[error("amplitude vector length {len} is not a power of two >= 2")]
    BadLength { len: usize },
    #[error("amplitudes not normalized (norm^2 = {norm})")]
    NotNormalized { norm: f64 },
    #[error("circuit width {found} exceeds register width {expected}")]
    WidthMismatch { expected: usize, found: usize },
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    fn random_state(n: usize, seed: u64) -> Statevector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        Statevector::from_amplitudes(v).unwrap()
    }

    fn every_kind(n: usize) -> Vec<Gate> {
        assert!(n >= 4);
        vec![
            Gate::Hadamard(1),
            Gate::PauliX(0),
            Gate::PauliZ(2),
            Gate::Swap(0, 3),
            Gate::Phase {
                target: 1,
                angle: 0.7,
            },
            Gate::ControlledPhase {
                controls: vec![0, 2],
                target: 3,
                angle: -1.3,
            },
            Gate::MultiControlledZ {
                controls: vec![1, 2],
                target: 0,
            },
            Gate::ScsTwo {
                qubits: [2, 1],
                theta: 1.1,
            },
            Gate::ScsThree {
                qubits: [3, 0, 2],
                theta: 0.4,
            },
        ]
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply(&Gate::Hadamard(0)).unwrap();
        assert!(close(s.amplitude(0), Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitude(1), Complex64::new(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn mcz_flips_all_ones() {
        let mut s = Statevector::basis(3, 0b111).unwrap();
        s.apply(&Gate::MultiControlledZ {
            controls: vec![0, 1],
            target: 2,
        })
        .unwrap();
        assert!(close(s.amplitude(0b111), Complex64::new(-1.0, 0.0)));
        let mut s = Statevector::basis(3, 0b011).unwrap();
        s.apply(&Gate::MultiControlledZ {
            controls: vec![0, 1],
            target: 2,
        })
        .unwrap();
        assert!(close(s.amplitude(0b011), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn phase_leaves_zero_alone() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply(&Gate::Phase {
            target: 0,
            angle: PI,
        })
        .unwrap();
        assert!(close(s.amplitude(0), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn index_errors() {
        let mut s = Statevector::zero(2).unwrap();
        assert_eq!(
            s.apply(&Gate::Hadamard(2)),
            Err(QsimError::IndexOutOfRange {
                qubit: 2,
                n_qubits: 2
            })
        );
        assert_eq!(
            s.apply(&Gate::ControlledPhase {
                controls: vec![1],
                target: 1,
                angle: 0.1
            }),
            Err(QsimError::ControlTargetOverlap { qubit: 1 })
        );
        assert!(matches!(
            Statevector::zero(MAX_QUBITS + 1),
            Err(QsimError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s0 = random_state(3, 1);
        let mut s = s0.clone();
        s.apply_circuit(&Circuit::new(3).unwrap()).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn hh_gives_uniform() {
        let mut c = Circuit::new(2).unwrap();
        c.push(Gate::Hadamard(0)).unwrap();
        c.push(Gate::Hadamard(1)).unwrap();
        let mut s = Statevector::zero(2).unwrap();
        s.apply_circuit(&c).unwrap();
        for i in 0..4 {
            assert!(close(s.amplitude(i), Complex64::new(0.5, 0.0)));
        }
    }

    #[test]
    fn every_gate_kind_is_unitary() {
        for g in every_kind(4) {
            let s0 = random_state(4, 7);
            let mut s = s0.clone();
            s.apply(&g).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            s.apply(&g.adjoint()).unwrap();
            for i in 0..16 {
                assert!(close(s.amplitude(i), s0.amplitude(i)), "{g:?}");
            }
        }
    }

    #[test]
    fn circuit_then_adjoint_restores_state() {
        let mut c = Circuit::new(4).unwrap();
        for g in every_kind(4) {
            c.push(g).unwrap();
        }
        let s0 = random_state(4, 3);
        let mut s = s0.clone();
        s.apply_circuit(&c).unwrap();
        s.apply_circuit(&c.adjoint()).unwrap();
        assert!((s.fidelity(&s0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scs_two_block_splits() {
        // qubits [a, b] = [1, 0]; |ab> = |01> is basis index 1.
        let theta = 2.0 * (0.5f64).sqrt().acos();
        let mut s = Statevector::basis(2, 0b01).unwrap();
        s.apply(&Gate::ScsTwo {
            qubits: [1, 0],
            theta,
        })
        .unwrap();
        assert!((s.probability(0b01) - 0.5).abs() < 1e-12);
        assert!((s.probability(0b10) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn qft_matches_dft_definition() {
        for m in 1..=4 {
            let reg: Vec<usize> = (0..m).collect();
            let dim = 1usize << m;
            for v in 0..dim {
                let mut s = Statevector::basis(m, v).unwrap();
                forward_qft(&mut s, &reg).unwrap();
                for k in 0..dim {
                    let want = Complex64::from_polar(
                        1.0 / (dim as f64).sqrt(),
                        2.0 * PI * (v * k) as f64 / dim as f64,
                    );
                    assert!(close(s.amplitude(k), want), "m={m} v={v} k={k}");
                }
            }
        }
    }

    #[test]
    fn inverse_qft_reads_out_encoded_phase() {
        let m = 4;
        let reg: Vec<usize> = (0..m).collect();
        let dim = 1usize << m;
        for v in 0..dim {
            let amps = (0..dim)
                .map(|k| {
                    Complex64::from_polar(
                        1.0 / (dim as f64).sqrt(),
                        2.0 * PI * (k * v) as f64 / dim as f64,
                    )
                })
                .collect();
            let mut s = Statevector::from_amplitudes(amps).unwrap();
            inverse_qft(&mut s, &reg).unwrap();
            assert!((s.probability(v) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_qft_single_qubit_is_hadamard() {
        let s0 = random_state(1, 11);
        let mut a = s0.clone();
        inverse_qft(&mut a, &[0]).unwrap();
        let mut b = s0;
        b.apply(&Gate::Hadamard(0)).unwrap();
        for i in 0..2 {
            assert!(close(a.amplitude(i), b.amplitude(i)));
        }
    }

    #[test]
    fn qft_on_subregister() {
        // Register on qubits {1, 3} of a 4-qubit state; others untouched.
        let s0 = random_state(4, 5);
        let mut s = s0.clone();
        forward_qft(&mut s, &[3, 1]).unwrap();
        inverse_qft(&mut s, &[3, 1]).unwrap();
        assert!((s.fidelity(&s0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic_basis_measurement() {
        let s = Statevector::basis(4, 0b1011).unwrap();
        for seed in 0..20 {
            assert_eq!(s.measure_register(&[0, 1, 2, 3], seed).unwrap(), 0b1011);
        }
        // sub-register read in given order
        assert_eq!(s.measure_register(&[3, 2], 0).unwrap(), 0b01);
    }

    #[test]
    fn born_frequencies_uniform() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply(&Gate::Hadamard(0)).unwrap();
        s.apply(&Gate::Hadamard(1)).unwrap();
        let shots = s.sample_shots(&[0, 1], 100_000, 42).unwrap();
        let mut counts = [0usize; 4];
        shots.iter().for_each(|&o| counts[o] += 1);
        for c in counts {
            assert!((c as f64 / 1e5 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let s = random_state(5, 9);
        let a = s.sample_shots(&[0, 2, 4], 500, 17).unwrap();
        let b = s.sample_shots(&[0, 2, 4], 500, 17).unwrap();
        assert_eq!(a, b);
        let c = s.sample_shots(&[0, 2, 4], 500, 18).unwrap();
        assert_ne!(a, c);
    }

    fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
        let mut qs: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            qs.swap(i, rng.random_range(0..=i));
        }
        let angle = rng.random_range(-3.0..3.0);
        let d = rng.random_range(1..4usize).min(n - 1);
        match rng.random_range(0..8) {
            0 => Gate::Hadamard(qs[0]),
            1 => Gate::PauliX(qs[0]),
            2 => Gate::PauliZ(qs[0]),
            3 => Gate::Phase { target: qs[0], angle },
            4 => Gate::ControlledPhase { controls: qs[1..=d].to_vec(), target: qs[0], angle },
            5 => Gate::MultiControlledZ { controls: qs[1..=d].to_vec(), target: qs[0] },
            6 => Gate::ScsTwo { qubits: [qs[0], qs[1]], theta: angle },
            _ => Gate::ScsThree { qubits: [qs[0], qs[1], qs[2]], theta: angle },
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_circuits_preserve_norm(
            n in 4usize..=12,
            seed in any::<u64>(),
            len in 1usize..=200,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = Circuit::new(n).unwrap();
            for _ in 0..len {
                c.push(random_gate(n, &mut rng)).unwrap();
            }
            let s0 = random_state(n, seed);
            let mut s = s0.clone();
            s.apply_circuit(&c).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
            s.apply_circuit(&c.adjoint()).unwrap();
            prop_assert!((s.fidelity(&s0) - 1.0).abs() < 1e-9);
        }

        #[test]
        fn qft_pair_is_identity(m in 1usize..=8, seed in any::<u64>()) {
            let s0 = random_state(m, seed);
            let reg: Vec<usize> = (0..m).collect();
            let mut s = s0.clone();
            forward_qft(&mut s, &reg).unwrap();
            inverse_qft(&mut s, &reg).unwrap();
            for i in 0..1 << m {
                prop_assert!((s.amplitude(i) - s0.amplitude(i)).norm() < 1e-10);
            }
        }
    }
}
