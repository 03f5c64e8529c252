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

//! Problem instances, objective evaluation, the quadratic form of the ADMM
//! binary subproblem, and exhaustive classical baselines.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{binomial, BitString, Combinations};
use crate::qdict::{PolyObjective, QdictError};

/// Largest feasible set the brute-force baseline will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;
/// Absolute tolerance used when counting degenerate optima.
pub const DEGENERACY_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const FILE_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("covariance not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("cardinality k = {k} outside 0..={n}")]
    CardinalityOutOfRange { n: usize, k: usize },
    #[error("non-finite entry in instance data")]
    NonFinite,
    #[error("trade-off weight must be positive, got {0}")]
    InvalidLambda(f64),
    #[error("shrinkage intensity must lie in [0, 1], got {0}")]
    InvalidRho(f64),
    #[error("covariance is degenerate (smallest eigenvalue {0})")]
    Degenerate(f64),
    #[error("{count} feasible strings exceed the brute-force limit")]
    TooLarge { count: u128 },
    #[error("reading instance: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing instance: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Poly(#[from] QdictError),
}

/// Fixed-cardinality binary quadratic program `min 1/2 x^T Sigma x - mu^T x`, `|x| = k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BqpFcInstance {
    pub n: usize,
    pub k: usize,
    pub sigma: DMatrix<f64>,
    pub mu: DVector<f64>,
}

fn check_bits(x: BitString, n: usize) -> Result<(), ModelError> {
    if n < 64 && x.0 >> n != 0 {
        return Err(ModelError::DimensionMismatch {
            expected: n,
            found: 64 - x.0.leading_zeros() as usize,
        });
    }
    Ok(())
}

impl BqpFcInstance {
    pub fn new(k: usize, sigma: DMatrix<f64>, mu: DVector<f64>) -> Result<Self, ModelError> {
        let n = mu.len();
        if sigma.nrows() != sigma.ncols() {
            return Err(ModelError::NotSquare {
                rows: sigma.nrows(),
                cols: sigma.ncols(),
            });
        }
        if sigma.nrows() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                found: sigma.nrows(),
            });
        }
        if k > n {
            return Err(ModelError::CardinalityOutOfRange { n, k });
        }
        if sigma.iter().chain(mu.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        for i in 0..n {
            for j in i + 1..n {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(ModelError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { n, k, sigma, mu })
    }

    /// `1/2 x^T Sigma x - mu^T x`.
    pub fn eval_quadratic(&self, x: BitString) -> Result<f64, ModelError> {
        check_bits(x, self.n)?;
        Ok(self.eval_real(&DVector::from_vec(x.to_f64(self.n))))
    }

    pub fn eval_real(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.sigma * x)) - self.mu.dot(x)
    }

    /// The objective as an integer-scaled polynomial for the oracle.
    pub fn poly_objective(&self) -> Result<PolyObjective, ModelError> {
        let lin: Vec<f64> = self.mu.iter().map(|m| -m).collect();
        Ok(PolyObjective::from_quadratic(
            self.n,
            |i, j| 0.5 * self.sigma[(i, j)],
            &lin,
            0.0,
        )?)
    }

    pub fn brute_force(&self) -> Result<BruteForceResult, ModelError> {
        brute_force(self.n, self.k, |x| self.eval_real(&DVector::from_vec(x.to_f64(self.n))))
    }
}

/// Risk-parity instance with its recorded data bounds: `||mu||_inf <= c1`,
/// `max diag(Sigma) <= c2`, `gamma_min(Sigma) >= c3`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskParityInstance {
    pub base: BqpFcInstance,
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

pub fn min_eigenvalue(sigma: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(sigma.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

impl RiskParityInstance {
    pub fn new(base: BqpFcInstance, lambda: f64) -> Result<Self, ModelError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ModelError::InvalidLambda(lambda));
        }
        let c1 = base.mu.amax();
        let c2 = base.sigma.diagonal().max();
        let c3 = min_eigenvalue(&base.sigma);
        if c3 <= 0.0 {
            return Err(ModelError::Degenerate(c3));
        }
        Ok(Self {
            base,
            lambda,
            c1,
            c2,
            c3,
        })
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn k(&self) -> usize {
        self.base.k
    }

    /// `sum_{i != j} (x1_i (Sigma x2)_i - x1_j (Sigma x2)_j)^2`.
    pub fn risk_term(&self, x1: &DVector<f64>, x2: &DVector<f64>) -> f64 {
        let rc = x1.component_mul(&(&self.base.sigma * x2));
        let mut acc = 0.0;
        for i in 0..rc.len() {
            for j in 0..rc.len() {
                if i != j {
                    acc += (rc[i] - rc[j]).powi(2);
                }
            }
        }
        acc
    }

    /// `lambda (-mu^T x + 1/2 x^T Sigma x)`.
    pub fn return_term(&self, x: &DVector<f64>) -> f64 {
        self.lambda * self.base.eval_real(x)
    }

    pub fn eval_real(&self, x: &DVector<f64>) -> f64 {
        self.risk_term(x, x) + self.return_term(x)
    }

    pub fn eval_risk_parity(&self, x: BitString) -> Result<f64, ModelError> {
        check_bits(x, self.n())?;
        Ok(self.eval_real(&DVector::from_vec(x.to_f64(self.n()))))
    }

    /// Multilinear expansion of the full quartic objective over binaries.
    ///
    /// Uses `sum_{i != j} (r_i - r_j)^2 = 2n sum_i r_i^2 - 2 (sum_i r_i)^2` with
    /// `r_i = x_i (Sigma x)_i`.
    pub fn poly_objective(&self) -> Result<PolyObjective, ModelError> {
        let n = self.n();
        let s = &self.base.sigma;
        let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut add = |idx: &[usize], c: f64| {
            let mut key = idx.to_vec();
            key.sort_unstable();
            key.dedup();
            *acc.entry(key).or_insert(0.0) += c;
        };
        for i in 0..n {
            for l in 0..n {
                for m in 0..n {
                    add(&[i, l, m], 2.0 * n as f64 * s[(i, l)] * s[(i, m)]);
                }
            }
        }
        for i in 0..n {
            for l in 0..n {
                for j in 0..n {
                    for m in 0..n {
                        add(&[i, l, j, m], -2.0 * s[(i, l)] * s[(j, m)]);
                    }
                }
            }
        }
        for i in 0..n {
            add(&[i], -self.lambda * self.base.mu[i]);
            for j in 0..n {
                add(&[i, j], 0.5 * self.lambda * s[(i, j)]);
            }
        }
        let constant = acc.remove(&Vec::new()).unwrap_or(0.0);
        let terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(PolyObjective::from_real_terms(n, &terms, constant)?)
    }

    pub fn brute_force(&self) -> Result<BruteForceResult, ModelError> {
        let n = self.n();
        brute_force(n, self.k(), |x| self.eval_real(&DVector::from_vec(x.to_f64(n))))
    }
}

/// `q(x) = x^T matrix x + linear^T x + constant`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticReduction {
    pub matrix: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
}

impl QuadraticReduction {
    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn eval_real(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.matrix * x)) + self.linear.dot(x) + self.constant
    }

    pub fn eval(&self, x: BitString) -> Result<f64, ModelError> {
        check_bits(x, self.n())?;
        Ok(self.eval_real(&DVector::from_vec(x.to_f64(self.n()))))
    }

    pub fn poly_objective(&self) -> Result<PolyObjective, ModelError> {
        let lin: Vec<f64> = self.linear.iter().copied().collect();
        Ok(PolyObjective::from_quadratic(
            self.n(),
            |i, j| self.matrix[(i, j)],
            &lin,
            self.constant,
        )?)
    }

    pub fn brute_force(&self, k: usize) -> Result<BruteForceResult, ModelError> {
        let n = self.n();
        brute_force(n, k, |x| self.eval_real(&DVector::from_vec(x.to_f64(n))))
    }
}

/// `H_a` with diagonal `2(n-1) a_i^2` and off-diagonal `-2 a_i a_j`, so that
/// `sum_{i != j} (x_i a_i - x_j a_j)^2 = x^T H_a x`.
pub fn disparity_matrix(a: &DVector<f64>) -> DMatrix<f64> {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * (n as f64 - 1.0) * a[i] * a[i]
        } else {
            -2.0 * a[i] * a[j]
        }
    })
}

/// Quadratic form of the binary ADMM subproblem
/// `sum_{i != j} (x_i a_i - x_j a_j)^2 + w^T x + beta/2 ||x - x2 - y||^2`
/// with `a = Sigma x2`. The `beta/2 ||x||^2` part is folded into the linear
/// term since `x_i^2 = x_i` on binaries.
pub fn reduce_x1_subproblem(
    inst: &RiskParityInstance,
    x2: &DVector<f64>,
    y: &DVector<f64>,
    w: &DVector<f64>,
    beta: f64,
) -> Result<QuadraticReduction, ModelError> {
    let n = inst.n();
    for v in [x2, y, w] {
        if v.len() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let a = &inst.base.sigma * x2;
    let shift = x2 + y;
    let linear = w - &shift * beta + DVector::from_element(n, beta / 2.0);
    Ok(QuadraticReduction {
        matrix: disparity_matrix(&a),
        linear,
        constant: beta / 2.0 * shift.norm_squared(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub x: BitString,
    pub value: f64,
    /// Feasible strings within `1e-12` of the optimum.
    pub degeneracy: u128,
}

/// Exhaustive minimization of `f` over weight-`k` strings.
///
/// Returns the lexicographically smallest minimizer (by sorted index list).
/// Values are computed in parallel; the reduction is order-independent.
pub fn brute_force<F>(n: usize, k: usize, f: F) -> Result<BruteForceResult, ModelError>
where
    F: Fn(BitString) -> f64 + Sync,
{
    if k > n {
        return Err(ModelError::CardinalityOutOfRange { n, k });
    }
    let count = binomial(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(ModelError::TooLarge { count });
    }
    let xs: Vec<BitString> = Combinations::new(n, k).collect();
    let values: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let near = |v: f64| v - best <= DEGENERACY_TOL;
    let first = values.iter().position(|&v| near(v)).expect("non-empty feasible set");
    Ok(BruteForceResult {
        x: xs[first],
        value: best,
        degeneracy: values.iter().filter(|&&v| near(v)).count() as u128,
    })
}

/// Exact integer brute force over the oracle's scaled values.
pub fn brute_force_scaled(obj: &PolyObjective, k: usize) -> Result<(BitString, i64, u128), ModelError> {
    let n = obj.n();
    if k > n {
        return Err(ModelError::CardinalityOutOfRange { n, k });
    }
    let count = binomial(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(ModelError::TooLarge { count });
    }
    let xs: Vec<BitString> = Combinations::new(n, k).collect();
    let values: Vec<i64> = xs.par_iter().map(|&x| obj.eval_scaled(x)).collect();
    let best = *values.iter().min().expect("non-empty feasible set");
    let first = values.iter().position(|&v| v == best).unwrap();
    let m = values.iter().filter(|&&v| v == best).count() as u128;
    Ok((xs[first], best, m))
}

/// `(1 - rho) Sigma + rho (tr(Sigma)/n) I`.
pub fn shrink_covariance(sigma: &DMatrix<f64>, rho: f64) -> Result<DMatrix<f64>, ModelError> {
    if sigma.nrows() != sigma.ncols() {
        return Err(ModelError::NotSquare {
            rows: sigma.nrows(),
            cols: sigma.ncols(),
        });
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(ModelError::InvalidRho(rho));
    }
    let n = sigma.nrows();
    let target = sigma.trace() / n as f64;
    Ok(sigma * (1.0 - rho) + DMatrix::identity(n, n) * (rho * target))
}

/// Seeded synthetic instance: `Sigma = F F^T / n + 0.1 I` with a standard-normal
/// `n x max(2, n/2)` factor matrix `F`, and `mu` uniform on `[0, 1]`.
pub fn synthetic_bqpfc(n: usize, k: usize, seed: u64) -> Result<BqpFcInstance, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = (n / 2).max(2);
    let f = DMatrix::<f64>::from_fn(n, factors, |_, _| StandardNormal.sample(&mut rng));
    let mut sigma = &f * f.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1;
    sigma = (&sigma + sigma.transpose()) * 0.5;
    let mu = DVector::from_fn(n, |_, _| rng.random::<f64>());
    BqpFcInstance::new(k, sigma, mu)
}

pub fn synthetic_risk_parity(n: usize, k: usize, lambda: f64, seed: u64) -> Result<RiskParityInstance, ModelError> {
    RiskParityInstance::new(synthetic_bqpfc(n, k, seed)?, lambda)
}

/// Seeded instance with integer `Sigma` and `mu` entries in `[-span, span]`,
/// so its oracle values live on a coarse integer grid.
pub fn integer_bqpfc(n: usize, k: usize, span: i64, seed: u64) -> Result<BqpFcInstance, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-span..=span) as f64;
            sigma[(i, j)] = v;
            sigma[(j, i)] = v;
        }
    }
    let mu = DVector::from_fn(n, |_, _| rng.random_range(-span..=span) as f64);
    BqpFcInstance::new(k, sigma, mu)
}

/// On-disk instance document; `sigma` is row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub sigma: Vec<f64>,
    pub mu: Vec<f64>,
}

impl InstanceFile {
    pub fn from_instance(inst: &BqpFcInstance, lambda: Option<f64>) -> Self {
        Self {
            n: inst.n,
            k: inst.k,
            lambda,
            sigma: inst.sigma.transpose().iter().copied().collect(),
            mu: inst.mu.iter().copied().collect(),
        }
    }

    /// Validates the document; `sigma` must be symmetric within `1e-9` and is
    /// then symmetrized exactly.
    pub fn into_instance(self) -> Result<(BqpFcInstance, Option<f64>), ModelError> {
        let n = self.n;
        if self.sigma.len() != n * n {
            return Err(ModelError::DimensionMismatch {
                expected: n * n,
                found: self.sigma.len(),
            });
        }
        if self.mu.len() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                found: self.mu.len(),
            });
        }
        let sigma = DMatrix::from_row_slice(n, n, &self.sigma);
        for i in 0..n {
            for j in i + 1..n {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > FILE_SYMMETRY_TOL {
                    return Err(ModelError::NotSymmetric { i, j });
                }
            }
        }
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        let inst = BqpFcInstance::new(self.k, sigma, DVector::from_vec(self.mu))?;
        Ok((inst, self.lambda))
    }
}

pub fn load_instance(path: &Path) -> Result<(BqpFcInstance, Option<f64>), ModelError> {
    let text = std::fs::read_to_string(path)?;
    let doc: InstanceFile = serde_json::from_str(&text)?;
    doc.into_instance()
}

pub fn save_instance(path: &Path, inst: &BqpFcInstance, lambda: Option<f64>) -> Result<(), ModelError> {
    let doc = InstanceFile::from_instance(inst, lambda);
    std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
