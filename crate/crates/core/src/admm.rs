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

//! Hybrid ADMM for the risk-parity model with a fixed-cardinality binary block.
//!
//! The quartic objective is split over `x1` (binary, `|x1| = k`), `x2` (real)
//! and a slack `y` with the consensus constraint `x1 - x2 - y = 0`:
//!
//! ```text
//! phi = g(x1, x2) + lambda (-mu^T x2 + 1/2 x2^T Sigma x2) + zeta/2 ||y||^2
//! L   = phi + w^T (x1 - x2 - y) + beta/2 ||x1 - x2 - y||^2
//! ```
//!
//! `x1` is updated by a fixed-cardinality quadratic solve (exhaustive or
//! adaptive Grover search), `x2` and `y` in closed form, `w` by dual ascent.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{binomial, BitString};
use crate::grover::{gas_minimize, GasConfig, GroverError, GroverPlan, OracleBackend, SearchMode};
use crate::model::{disparity_matrix, reduce_x1_subproblem, ModelError, RiskParityInstance};

/// Relative slack on the monitored inequalities.
pub const MONITOR_SLACK: f64 = 1e-8;
/// Absolute tolerance of the primal-residual identity.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Subproblem optimality gaps are reported up to this many feasible strings.
pub const GAP_REPORT_LIMIT: u128 = 100_000;
const T_MAX_CAP: f64 = 1e6;

#[derive(Debug, Error)]
pub enum AdmmError {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("x2 system is not positive definite")]
    SingularSystem,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Grover(#[from] GroverError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X1Solver {
    BruteForce,
    GasHard { gas: GasConfig, backend: OracleBackend },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmmConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub zeta: f64,
    pub beta: f64,
    pub t_max: usize,
    pub x1_solver: X1Solver,
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<(), AdmmError> {
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(AdmmError::InvalidTolerance(format!("{name} = {v} not in (0, 1)")));
            }
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return Err(AdmmError::InvalidConfig(format!("zeta = {} must be positive", self.zeta)));
        }
        if !(self.beta > 2f64.sqrt() * self.zeta) {
            return Err(AdmmError::InvalidConfig(format!(
                "beta = {} must exceed sqrt(2) zeta = {}",
                self.beta,
                2f64.sqrt() * self.zeta
            )));
        }
        if self.t_max == 0 {
            return Err(AdmmError::InvalidConfig("t_max must be positive".into()));
        }
        Ok(())
    }

    /// Stopping threshold on `||y+ - y||`.
    pub fn stop_threshold(&self) -> f64 {
        self.epsilon / (self.beta + 1.0)
    }
}

/// `ceil(n^6 k^{3/2} / (eps^2 delta))`, capped at `10^6`.
pub fn default_t_max(n: usize, k: usize, epsilon: f64, delta: f64) -> usize {
    let t = (n as f64).powi(6) * (k as f64).powf(1.5) / (epsilon * epsilon * delta);
    t.ceil().clamp(1.0, T_MAX_CAP) as usize
}

/// Right-hand side of the `zeta` condition:
/// `[2 c2^2 n^3 (sqrt k + eps + delta) + c1 lambda sqrt n + c2 lambda n (sqrt k + eps + delta) + eps] / delta`.
pub fn zeta_lower_bound(n: usize, k: usize, lambda: f64, c1: f64, c2: f64, epsilon: f64, delta: f64) -> f64 {
    let (n, s) = (n as f64, (k as f64).sqrt() + epsilon + delta);
    (2.0 * c2 * c2 * n.powi(3) * s + c1 * lambda * n.sqrt() + c2 * lambda * n * s + epsilon) / delta
}

/// `zeta = c4_margin * bound` (nudged strictly above the bound) and `beta = c5 zeta`.
pub fn select_parameters(
    inst: &RiskParityInstance,
    epsilon: f64,
    delta: f64,
    c4_margin: f64,
    c5: f64,
) -> Result<(f64, f64), AdmmError> {
    for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(AdmmError::InvalidTolerance(format!("{name} = {v} not in (0, 1)")));
        }
    }
    if !(c4_margin >= 1.0) {
        return Err(AdmmError::InvalidConfig(format!("c4 margin {c4_margin} below 1")));
    }
    if !(c5 > 2f64.sqrt()) {
        return Err(AdmmError::InvalidConfig(format!("c5 = {c5} must exceed sqrt(2)")));
    }
    let bound = zeta_lower_bound(inst.n(), inst.k(), inst.lambda, inst.c1, inst.c2, epsilon, delta);
    let zeta = c4_margin * bound * (1.0 + 1e-12);
    Ok((zeta, c5 * zeta))
}

/// One ADMM iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmmState {
    pub t: usize,
    pub x1: BitString,
    pub x2: DVector<f64>,
    pub y: DVector<f64>,
    pub w: DVector<f64>,
}

impl AdmmState {
    pub fn x1_vec(&self, n: usize) -> DVector<f64> {
        DVector::from_vec(self.x1.to_f64(n))
    }
}

/// Augmented Lagrangian; `+inf` when `x1` is not a weight-`k` string.
pub fn eval_lagrangian(inst: &RiskParityInstance, state: &AdmmState, zeta: f64, beta: f64) -> f64 {
    let n = inst.n();
    if state.x1.weight() != inst.k() || (n < 64 && state.x1.0 >> n != 0) {
        return f64::INFINITY;
    }
    let x1 = state.x1_vec(n);
    let r = &x1 - &state.x2 - &state.y;
    inst.risk_term(&x1, &state.x2)
        + inst.return_term(&state.x2)
        + zeta / 2.0 * state.y.norm_squared()
        + state.w.dot(&r)
        + beta / 2.0 * r.norm_squared()
}

/// Lower bound `-lambda c1^2 n / (2 c3)` on the Lagrangian along the iterates.
pub fn lagrangian_lower_bound(inst: &RiskParityInstance) -> f64 {
    -inst.lambda * inst.c1 * inst.c1 * inst.n() as f64 / (2.0 * inst.c3)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub t: usize,
    pub lagrangian_prev: f64,
    pub lagrangian: f64,
    /// `L(t) - L(t+1)`.
    pub lagrangian_drop: f64,
    /// `(beta/2 - zeta^2/beta) (||x2+ - x2||^2 + ||y+ - y||^2)`.
    pub descent_rhs: f64,
    pub delta_dual: f64,
    /// `||x1+ - x2+ - y+||`.
    pub primal_residual: f64,
    /// `(zeta/beta) ||y+ - y||`.
    pub predicted_residual: f64,
    /// `(beta + zeta/beta) ||y+ - y||`.
    pub subgrad_bound: f64,
    /// `||w+ - zeta y+||`.
    pub dual_gap: f64,
    pub identity_ok: bool,
    pub descent_ok: bool,
    pub lower_bound_ok: bool,
}

pub fn monitor_step(
    inst: &RiskParityInstance,
    prev: &AdmmState,
    next: &AdmmState,
    zeta: f64,
    beta: f64,
) -> MonitorRecord {
    let n = inst.n();
    let l_prev = eval_lagrangian(inst, prev, zeta, beta);
    let l_next = eval_lagrangian(inst, next, zeta, beta);
    let dy = (&next.y - &prev.y).norm();
    let dx2 = (&next.x2 - &prev.x2).norm();
    let c1 = beta / 2.0 - zeta * zeta / beta;
    let descent_rhs = c1 * (dx2 * dx2 + dy * dy);
    let primal_residual = (next.x1_vec(n) - &next.x2 - &next.y).norm();
    let predicted_residual = zeta / beta * dy;
    let drop = l_prev - l_next;
    let lb = lagrangian_lower_bound(inst);
    MonitorRecord {
        t: next.t,
        lagrangian_prev: l_prev,
        lagrangian: l_next,
        lagrangian_drop: drop,
        descent_rhs,
        delta_dual: dy,
        primal_residual,
        predicted_residual,
        subgrad_bound: (beta + zeta / beta) * dy,
        dual_gap: (&next.w - &next.y * zeta).norm(),
        identity_ok: (primal_residual - predicted_residual).abs() < IDENTITY_TOL,
        descent_ok: drop >= descent_rhs - MONITOR_SLACK * l_prev.abs().max(1.0),
        lower_bound_ok: l_prev >= lb - 1e-6 && l_next >= lb - 1e-6,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
}

/// One CSV trace row per completed iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    #[serde(rename = "L_beta")]
    pub l_beta: f64,
    pub delta_dual: f64,
    pub primal_residual: f64,
    pub predicted_residual: f64,
    pub descent_lhs: f64,
    pub descent_rhs: f64,
    pub x1_bits: String,
    pub solver_queries: u64,
}

/// Subproblem outcome when the search result is checked against enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemGap {
    pub t: usize,
    pub found: f64,
    pub optimum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmmResult {
    pub x1_final: BitString,
    pub final_state: AdmmState,
    pub termination: Termination,
    pub iterations: usize,
    pub records: Vec<MonitorRecord>,
    pub trace: Vec<TraceRow>,
    pub solver_queries: u64,
    /// Iterations whose search hit its query budget.
    pub budget_events: Vec<usize>,
    /// Non-zero gaps between searched and enumerated subproblem optima.
    pub gaps: Vec<SubproblemGap>,
}

impl AdmmResult {
    /// `||x1 - x2||` at termination.
    pub fn consistency(&self) -> f64 {
        let n = self.final_state.x2.len();
        (self.final_state.x1_vec(n) - &self.final_state.x2).norm()
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.trace {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn solve_x2(inst: &RiskParityInstance, x1: &DVector<f64>, state: &AdmmState, beta: f64) -> Result<DVector<f64>, AdmmError> {
    let n = inst.n();
    let sigma = &inst.base.sigma;
    let q = sigma * disparity_matrix(x1) * sigma;
    let a = q * 2.0 + sigma * inst.lambda + DMatrix::identity(n, n) * beta;
    let b = &inst.base.mu * inst.lambda + &state.w + (x1 - &state.y) * beta;
    let chol = a.cholesky().ok_or(AdmmError::SingularSystem)?;
    Ok(chol.solve(&b))
}

/// Runs the hybrid ADMM from a seeded random weight-`k` start with
/// `x2 = x1`, `y = w = 0`.
pub fn admm_solve(inst: &RiskParityInstance, cfg: &AdmmConfig, seed: u64) -> Result<AdmmResult, AdmmError> {
    cfg.validate()?;
    let (n, k) = (inst.n(), inst.k());
    let (zeta, beta) = (cfg.zeta, cfg.beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x1 = BitString::from_indices(&sample(&mut rng, n, k).into_vec());
    let mut state = AdmmState {
        t: 0,
        x1,
        x2: DVector::from_vec(x1.to_f64(n)),
        y: DVector::zeros(n),
        w: DVector::zeros(n),
    };
    let mut records = Vec::new();
    let mut trace = Vec::new();
    let mut budget_events = Vec::new();
    let mut gaps = Vec::new();
    let mut queries = 0u64;
    let mut delta_dual = f64::INFINITY;

    while state.t < cfg.t_max && delta_dual >= cfg.stop_threshold() {
        // drawn in every mode so all solvers share the same random stream
        let sub_seed = rng.next_u64();
        let red = reduce_x1_subproblem(inst, &state.x2, &state.y, &state.w, beta)?;
        let x1_new = match &cfg.x1_solver {
            X1Solver::BruteForce => red.brute_force(k)?.x,
            X1Solver::GasHard { gas, backend } => {
                let poly = red.poly_objective()?;
                let plan = GroverPlan::new(&poly, k, SearchMode::Hard, *backend)?;
                let res = gas_minimize(&plan, &GasConfig { seed: sub_seed, ..gas.clone() })?;
                queries += res.oracle_queries;
                if res.budget_exhausted {
                    budget_events.push(state.t + 1);
                }
                if binomial(n, k) <= GAP_REPORT_LIMIT {
                    let best = red.brute_force(k)?;
                    let found = red.eval(res.best_x)?;
                    if found - best.value > 1e-9 * best.value.abs().max(1.0) {
                        gaps.push(SubproblemGap {
                            t: state.t + 1,
                            found,
                            optimum: best.value,
                        });
                    }
                }
                res.best_x
            }
        };
        let x1v = DVector::from_vec(x1_new.to_f64(n));
        let x2 = solve_x2(inst, &x1v, &state, beta)?;
        let y = (&state.w + (&x1v - &x2) * beta) / (zeta + beta);
        let w = &state.w + (&x1v - &x2 - &y) * beta;
        let next = AdmmState {
            t: state.t + 1,
            x1: x1_new,
            x2,
            y,
            w,
        };
        let rec = monitor_step(inst, &state, &next, zeta, beta);
        delta_dual = rec.delta_dual;
        trace.push(TraceRow {
            t: next.t,
            l_beta: rec.lagrangian,
            delta_dual: rec.delta_dual,
            primal_residual: rec.primal_residual,
            predicted_residual: rec.predicted_residual,
            descent_lhs: rec.lagrangian_drop,
            descent_rhs: rec.descent_rhs,
            x1_bits: x1_new.render(n),
            solver_queries: queries,
        });
        records.push(rec);
        state = next;
    }
    let termination = if delta_dual < cfg.stop_threshold() {
        Termination::Converged
    } else {
        Termination::MaxIterations
    };
    Ok(AdmmResult {
        x1_final: state.x1,
        iterations: state.t,
        final_state: state,
        termination,
        records,
        trace,
        solver_queries: queries,
        budget_events,
        gaps,
    })
}
