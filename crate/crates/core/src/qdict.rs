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

//! Quantum-dictionary oracle.
//!
//! An objective `f` over `n` binary variables is written into an `m`-qubit
//! value register as the two's-complement integer `f(x) - y`: Hadamards on the
//! register, one phase-rotation ladder per monomial, then an inverse QFT.
//! Conjugating a `Z` on the register's top bit with that encoder gives the
//! sign oracle `|x> -> -|x>` iff `f(x) < y`.
//!
//! Layout: variable `x_i` is qubit `i`, value-register bit `j` is qubit `n + j`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::bits::{binomial, BitString};
use crate::qsim::{inverse_qft_circuit, Circuit, Gate, QsimError};

/// Highest monomial degree the encoder supports.
pub const MAX_DEGREE: usize = 4;
/// Largest scale exponent tried when converting real coefficients.
pub const MAX_SCALE_BITS: u32 = 16;
const SCALE_TOL: f64 = 1e-9;
const MAX_PRECISION: usize = 62;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdictError {
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("monomial of degree {degree} exceeds the supported degree {MAX_DEGREE}")]
    DegreeTooHigh { degree: usize },
    #[error("coefficient or value does not fit the integer range")]
    Overflow,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("values in [{lo}, {hi}] minus threshold {y} leave the {m}-bit two's-complement window")]
    RangeViolation { lo: i64, hi: i64, y: i64, m: usize },
    #[error("value register needs at least one qubit")]
    EmptyRegister,
    #[error(transparent)]
    Sim(#[from] QsimError),
}

/// Multilinear polynomial with integer coefficients in units of `2^-scale_bits`.
///
/// Keys are sorted, duplicate-free index lists of length 1 to 4; `x_i^2` is
/// folded to `x_i` on insertion and zero coefficients are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyObjective {
    n: usize,
    terms: BTreeMap<Vec<usize>, i64>,
    scale_bits: u32,
    constant: i64,
}

impl PolyObjective {
    pub fn new(n: usize, scale_bits: u32) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
            scale_bits,
            constant: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale_bits(&self) -> u32 {
        self.scale_bits
    }

    /// `2^scale_bits` as a float.
    pub fn scale(&self) -> f64 {
        (1u64 << self.scale_bits) as f64
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, i64> {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_constant(&mut self, c: i64) -> Result<(), QdictError> {
        self.constant = self.constant.checked_add(c).ok_or(QdictError::Overflow)?;
        Ok(())
    }

    /// Adds `coeff * prod_{i in indices} x_i`, folding repeated indices.
    pub fn add_term(&mut self, indices: &[usize], coeff: i64) -> Result<(), QdictError> {
        if let Some(&index) = indices.iter().find(|&&i| i >= self.n) {
            return Err(QdictError::IndexOutOfRange { index, n: self.n });
        }
        let mut key = indices.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return self.add_constant(coeff);
        }
        if key.len() > MAX_DEGREE {
            return Err(QdictError::DegreeTooHigh { degree: key.len() });
        }
        let slot = self.terms.entry(key).or_insert(0);
        *slot = slot.checked_add(coeff).ok_or(QdictError::Overflow)?;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    /// Builds an integer objective from real coefficients, picking the smallest
    /// scale `p <= 16` at which every coefficient is an integer within `1e-9`
    /// (or `p = 16` with rounding).
    pub fn from_real_terms(
        n: usize,
        terms: &[(Vec<usize>, f64)],
        constant: f64,
    ) -> Result<Self, QdictError> {
        let all = || terms.iter().map(|(_, c)| *c).chain(std::iter::once(constant));
        if all().any(|c| !c.is_finite()) {
            return Err(QdictError::NonFinite);
        }
        let p = (0..=MAX_SCALE_BITS)
            .find(|&p| {
                let s = (1u64 << p) as f64;
                all().all(|c| (c * s - (c * s).round()).abs() < SCALE_TOL)
            })
            .unwrap_or(MAX_SCALE_BITS);
        let s = (1u64 << p) as f64;
        let to_int = |c: f64| -> Result<i64, QdictError> {
            let v = (c * s).round();
            if v.abs() >= (1u64 << MAX_PRECISION) as f64 {
                return Err(QdictError::Overflow);
            }
            Ok(v as i64)
        };
        let mut obj = Self::new(n, p);
        for (idx, c) in terms {
            obj.add_term(idx, to_int(*c)?)?;
        }
        obj.add_constant(to_int(constant)?)?;
        Ok(obj)
    }

    /// `x^T q x + linear^T x + constant` over binaries, with `q` given row-major.
    pub fn from_quadratic(
        n: usize,
        q: impl Fn(usize, usize) -> f64,
        linear: &[f64],
        constant: f64,
    ) -> Result<Self, QdictError> {
        if linear.len() != n {
            return Err(QdictError::IndexOutOfRange { index: linear.len().min(n), n });
        }
        let mut terms = Vec::with_capacity(n * (n + 1) / 2);
        for (i, l) in linear.iter().enumerate() {
            terms.push((vec![i], q(i, i) + l));
            for j in i + 1..n {
                terms.push((vec![i, j], q(i, j) + q(j, i)));
            }
        }
        Self::from_real_terms(n, &terms, constant)
    }

    /// Value in scaled integer units.
    pub fn eval_scaled(&self, x: BitString) -> i64 {
        self.terms.iter().fold(self.constant, |acc, (s, c)| {
            if s.iter().all(|&i| x.get(i)) {
                acc + c
            } else {
                acc
            }
        })
    }

    pub fn eval(&self, x: BitString) -> f64 {
        self.eval_scaled(x) as f64 / self.scale()
    }

    /// Monomials as `(bitmask, coefficient)` pairs.
    pub fn masked_terms(&self) -> Vec<(u64, i64)> {
        self.terms
            .iter()
            .map(|(s, &c)| (BitString::from_indices(s).0, c))
            .collect()
    }

    /// Interval `[lo, hi]` containing every value, restricted to weight-`k`
    /// strings when `cardinality = Some(k)`.
    ///
    /// At most `C(k, d)` monomials of degree `d` are active on a weight-`k`
    /// string, so the bound sums the `C(k, d)` largest positive (negative)
    /// coefficients of each degree.
    pub fn value_bounds(&self, cardinality: Option<usize>) -> (i64, i64) {
        let mut by_degree: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        for (s, &c) in &self.terms {
            by_degree.entry(s.len()).or_default().push(c);
        }
        let (mut lo, mut hi) = (self.constant as i128, self.constant as i128);
        for (d, mut cs) in by_degree {
            let cap = match cardinality {
                Some(k) => binomial(k, d).min(cs.len() as u128) as usize,
                None => cs.len(),
            };
            cs.sort_unstable();
            lo += cs.iter().take(cap).filter(|&&c| c < 0).map(|&c| c as i128).sum::<i128>();
            hi += cs
                .iter()
                .rev()
                .take(cap)
                .filter(|&&c| c > 0)
                .map(|&c| c as i128)
                .sum::<i128>();
        }
        let clamp = |v: i128| v.clamp(i64::MIN as i128, i64::MAX as i128) as i64;
        (clamp(lo), clamp(hi))
    }
}

/// Smallest register width `m` with `2^(m-1) > hi - lo`, so that `v - y` fits
/// the two's-complement window for every value `v` and threshold `y` in `[lo, hi]`.
pub fn auto_precision(lo: i64, hi: i64) -> Result<usize, QdictError> {
    let span = (hi as i128 - lo as i128).max(0) as u128;
    let m = 1 + (128 - span.leading_zeros()) as usize;
    if m > MAX_PRECISION {
        return Err(QdictError::Overflow);
    }
    Ok(m)
}

/// Value-register width and threshold for one oracle instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub m: usize,
    /// Threshold in scaled units.
    pub y: i64,
    /// When set, only weight-`k` inputs must fit the window.
    pub cardinality: Option<usize>,
}

impl OracleConfig {
    /// Auto-sized configuration for thresholds inside the objective's value range.
    pub fn auto(obj: &PolyObjective, cardinality: Option<usize>, y: i64) -> Result<Self, QdictError> {
        let (lo, hi) = obj.value_bounds(cardinality);
        Ok(Self {
            m: auto_precision(lo, hi)?,
            y,
            cardinality,
        })
    }

    /// Interval check of the two's-complement window.
    pub fn check(&self, obj: &PolyObjective) -> Result<(), QdictError> {
        if self.m == 0 {
            return Err(QdictError::EmptyRegister);
        }
        if self.m > MAX_PRECISION {
            return Err(QdictError::Overflow);
        }
        let (lo, hi) = obj.value_bounds(self.cardinality);
        let half = 1i128 << (self.m - 1);
        let (y, lo128, hi128) = (self.y as i128, lo as i128, hi as i128);
        if lo128 - y < -half || hi128 - y >= half {
            return Err(QdictError::RangeViolation {
                lo,
                hi,
                y: self.y,
                m: self.m,
            });
        }
        Ok(())
    }
}

/// The encoder split at the inverse QFT.
#[derive(Clone, Debug)]
pub struct ValueEncoder {
    pub n: usize,
    pub m: usize,
    /// Hadamards and rotation ladders; leaves `2^{-m/2} sum_K e^{2 pi i K v / 2^m} |K>`.
    pub phase_stage: Circuit,
    pub iqft: Circuit,
}

impl ValueEncoder {
    pub fn register(&self) -> Vec<usize> {
        (self.n..self.n + self.m).collect()
    }

    pub fn circuit(&self) -> Result<Circuit, QdictError> {
        let mut c = self.phase_stage.clone();
        c.append(&self.iqft)?;
        Ok(c)
    }
}

/// Angle `2 pi (c 2^j mod 2^m) / 2^m`.
fn ladder_angle(c: i64, j: usize, m: usize) -> f64 {
    let modulus = 1i128 << m;
    let r = ((c as i128) << j).rem_euclid(modulus);
    2.0 * PI * r as f64 / modulus as f64
}

pub fn build_encoder_stages(obj: &PolyObjective, cfg: &OracleConfig) -> Result<ValueEncoder, QdictError> {
    cfg.check(obj)?;
    let (n, m) = (obj.n, cfg.m);
    let mut phase = Circuit::new(n + m)?;
    for j in 0..m {
        phase.push(Gate::Hadamard(n + j))?;
    }
    let offset = obj.constant as i128 - cfg.y as i128;
    // the window check bounds |offset| well inside i64 unless the terms cancel it
    let offset = i64::try_from(offset).map_err(|_| QdictError::Overflow)?;
    if offset != 0 {
        for j in 0..m {
            phase.push(Gate::Phase {
                target: n + j,
                angle: ladder_angle(offset, j, m),
            })?;
        }
    }
    for (s, &c) in &obj.terms {
        for j in 0..m {
            phase.push(Gate::ControlledPhase {
                controls: s.clone(),
                target: n + j,
                angle: ladder_angle(c, j, m),
            })?;
        }
    }
    let register: Vec<usize> = (n..n + m).collect();
    let iqft = inverse_qft_circuit(n + m, &register)?;
    Ok(ValueEncoder {
        n,
        m,
        phase_stage: phase,
        iqft,
    })
}

/// `|x>|0^m> -> |x>|f(x) - y mod 2^m>`.
pub fn build_value_encoder(obj: &PolyObjective, cfg: &OracleConfig) -> Result<Circuit, QdictError> {
    build_encoder_stages(obj, cfg)?.circuit()
}

/// Encoder, `Z` on the sign bit (qubit `n + m - 1`), encoder adjoint.
pub fn build_sign_oracle(obj: &PolyObjective, cfg: &OracleConfig) -> Result<Circuit, QdictError> {
    let enc = build_value_encoder(obj, cfg)?;
    let mut c = enc.clone();
    c.push(Gate::PauliZ(obj.n + cfg.m - 1))?;
    c.append(&enc.adjoint())?;
    Ok(c)
}

/// Two's-complement bit pattern of `v` on `m` bits.
pub fn twos_complement(v: i64, m: usize) -> usize {
    (v as i128).rem_euclid(1i128 << m) as usize
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::bits::Combinations;
    use crate::qsim::Statevector;

    fn linear(n: usize, coeffs: &[i64], constant: i64) -> PolyObjective {
        let mut o = PolyObjective::new(n, 0);
        for (i, &c) in coeffs.iter().enumerate() {
            o.add_term(&[i], c).unwrap();
        }
        o.add_constant(constant).unwrap();
        o
    }

    fn random_quadratic(n: usize, rng: &mut ChaCha8Rng, span: i64) -> PolyObjective {
        let mut o = PolyObjective::new(n, 0);
        for i in 0..n {
            o.add_term(&[i], rng.random_range(-span..=span)).unwrap();
            for j in i + 1..n {
                o.add_term(&[i, j], rng.random_range(-span..=span)).unwrap();
            }
        }
        o.add_constant(rng.random_range(-span..=span)).unwrap();
        o
    }

    fn run_encoder(enc: &Circuit, n: usize, m: usize, x: usize) -> Vec<f64> {
        let mut s = Statevector::basis(n + m, x).unwrap();
        s.apply_circuit(enc).unwrap();
        s.register_probabilities(&(n..n + m).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn folding_and_evaluation() {
        let mut o = PolyObjective::new(3, 0);
        o.add_term(&[1, 1], 5).unwrap();
        o.add_term(&[2, 0, 2], -2).unwrap();
        assert_eq!(o.terms().get(&vec![1]), Some(&5));
        assert_eq!(o.terms().get(&vec![0, 2]), Some(&-2));
        o.add_term(&[1], -5).unwrap();
        assert!(!o.terms().contains_key(&vec![1]));
        assert_eq!(o.eval_scaled(BitString(0b101)), -2);
        assert_eq!(
            o.add_term(&[0, 1, 2, 0, 1, 3], 1).unwrap_err(),
            QdictError::IndexOutOfRange { index: 3, n: 3 }
        );
        let mut big = PolyObjective::new(6, 0);
        assert_eq!(
            big.add_term(&[0, 1, 2, 3, 4], 1).unwrap_err(),
            QdictError::DegreeTooHigh { degree: 5 }
        );
    }

    #[test]
    fn real_coefficients_pick_minimal_scale() {
        let o = PolyObjective::from_real_terms(2, &[(vec![0], 0.5), (vec![0, 1], -0.25)], 1.0).unwrap();
        assert_eq!(o.scale_bits(), 2);
        assert_eq!(o.eval(BitString(0b11)), 1.25);

        let o = PolyObjective::from_real_terms(1, &[(vec![0], 0.1)], 0.0).unwrap();
        assert_eq!(o.scale_bits(), MAX_SCALE_BITS);
        assert!((o.eval(BitString(1)) - 0.1).abs() <= 0.5 / o.scale());

        assert_eq!(
            PolyObjective::from_real_terms(1, &[(vec![0], f64::NAN)], 0.0).unwrap_err(),
            QdictError::NonFinite
        );
    }

    #[test]
    fn bounds_are_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=7 {
            let o = random_quadratic(n, &mut rng, 9);
            let (lo, hi) = o.value_bounds(None);
            for x in 0..1u64 << n {
                let v = o.eval_scaled(BitString(x));
                assert!(lo <= v && v <= hi);
            }
            for k in 0..=n {
                let (lo, hi) = o.value_bounds(Some(k));
                for x in Combinations::new(n, k) {
                    let v = o.eval_scaled(x);
                    assert!(lo <= v && v <= hi, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn precision_examples() {
        // values {-3..4} with thresholds in the same range span 7
        let o = linear(3, &[1, 2, 4], -3);
        let (lo, hi) = o.value_bounds(None);
        assert_eq!((lo, hi), (-3, 4));
        let m = auto_precision(lo, hi).unwrap();
        assert_eq!(m, 4);
        for y in lo..=hi {
            for v in lo..=hi {
                assert!((-(1i64 << (m - 1))..1i64 << (m - 1)).contains(&(v - y)));
            }
        }
        assert_eq!(auto_precision(0, 0).unwrap(), 1);
        assert_eq!(auto_precision(0, 1).unwrap(), 2);
        assert_eq!(auto_precision(0, 8).unwrap(), 5);
        assert_eq!(auto_precision(i64::MIN, i64::MAX).unwrap_err(), QdictError::Overflow);
    }

    #[test]
    fn encoder_examples() {
        let o = linear(1, &[1], 0);
        let cfg = OracleConfig {
            m: 3,
            y: 0,
            cardinality: None,
        };
        let enc = build_value_encoder(&o, &cfg).unwrap();
        assert!((run_encoder(&enc, 1, 3, 1)[0b001] - 1.0).abs() < 1e-12);
        assert!((run_encoder(&enc, 1, 3, 0)[0b000] - 1.0).abs() < 1e-12);

        let o = PolyObjective::new(1, 0);
        let cfg = OracleConfig {
            m: 4,
            y: 3,
            cardinality: None,
        };
        let enc = build_value_encoder(&o, &cfg).unwrap();
        assert!((run_encoder(&enc, 1, 4, 0)[0b1101] - 1.0).abs() < 1e-12);
        assert_eq!(twos_complement(-3, 4), 0b1101);
    }

    #[test]
    fn encoder_matches_classical_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let o = random_quadratic(n, &mut rng, 3);
        let (lo, hi) = o.value_bounds(None);
        let y = rng.random_range(lo..=hi);
        let cfg = OracleConfig {
            m: 6,
            y,
            cardinality: None,
        };
        cfg.check(&o).unwrap();
        let enc = build_value_encoder(&o, &cfg).unwrap();
        for x in 0..1usize << n {
            let want = twos_complement(o.eval_scaled(BitString(x as u64)) - y, 6);
            assert!(run_encoder(&enc, n, 6, x)[want] > 1.0 - 1e-9, "x={x:04b}");
        }
    }

    #[test]
    fn window_violation_is_rejected() {
        let o = linear(2, &[5, 5], 0);
        let cfg = OracleConfig {
            m: 4,
            y: 0,
            cardinality: None,
        };
        assert!(matches!(cfg.check(&o), Err(QdictError::RangeViolation { .. })));
        let weight_one = OracleConfig {
            cardinality: Some(1),
            ..cfg
        };
        weight_one.check(&o).unwrap();
    }

    #[test]
    fn phases_before_inverse_qft() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (n, m) = (3, 5);
        let o = random_quadratic(n, &mut rng, 2);
        let y = 1;
        let enc = build_encoder_stages(
            &o,
            &OracleConfig {
                m,
                y,
                cardinality: None,
            },
        )
        .unwrap();
        let amp = (1.0 / (1u64 << m) as f64).sqrt();
        for x in 0..1usize << n {
            let v = o.eval_scaled(BitString(x as u64)) - y;
            let mut s = Statevector::basis(n + m, x).unwrap();
            s.apply_circuit(&enc.phase_stage).unwrap();
            for k in 0..1usize << m {
                let want = Complex64::from_polar(amp, 2.0 * PI * (k as f64) * (v as f64) / (1u64 << m) as f64);
                assert!((s.amplitude(x | k << n) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sign_oracle_phases_and_restores_ancilla() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (n, k) = (4, 2);
        let o = random_quadratic(n, &mut rng, 4);
        let feasible: Vec<_> = Combinations::new(n, k).collect();
        let values: Vec<i64> = feasible.iter().map(|&x| o.eval_scaled(x)).collect();
        let (vmin, vmax) = (*values.iter().min().unwrap(), *values.iter().max().unwrap());
        let mut thresholds = vec![vmin - 1, vmax + 1];
        thresholds.extend(values.iter().copied());
        for y in thresholds {
            let mut cfg = OracleConfig::auto(&o, Some(k), y).unwrap();
            while cfg.check(&o).is_err() {
                cfg.m += 1;
            }
            let oracle = build_sign_oracle(&o, &cfg).unwrap();
            for (&x, &v) in feasible.iter().zip(&values) {
                let mut s = Statevector::basis(n + cfg.m, x.0 as usize).unwrap();
                s.apply_circuit(&oracle).unwrap();
                let sign = if v < y { -1.0 } else { 1.0 };
                assert!((s.amplitude(x.0 as usize) - Complex64::new(sign, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dense_rotation_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (n, m) in [(4, 3), (6, 4)] {
            let mut o = PolyObjective::new(n, 0);
            for d in 1..=4 {
                for s in Combinations::new(n, d) {
                    o.add_term(&s.indices(), rng.random_range(1..=3)).unwrap();
                }
            }
            let cfg = OracleConfig {
                m,
                y: 0,
                cardinality: Some(0),
            };
            let counts = build_encoder_stages(&o, &cfg).unwrap().phase_stage.controlled_rotation_counts();
            for d in 1..=4 {
                assert_eq!(counts[&d] as u128, m as u128 * binomial(n, d));
            }
        }
    }
}
