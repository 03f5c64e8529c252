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

//! Grover search over the fixed-cardinality subspace or the full hypercube,
//! and the randomized adaptive-search driver built on it.
//!
//! Two oracle backends are available. `Circuit` simulates the full
//! quantum-dictionary sign oracle with its value register; `Phase` applies the
//! same sign pattern `(-1)^[f(x) < y]` directly as a diagonal on the variable
//! register. Both give identical variable-register states; `Phase` exists so
//! that objectives whose value register would exceed the simulator cap can
//! still be searched.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{binomial, BitString};
use crate::dicke::{build_constrained_diffusion, constrained_state_prep, DickeError};
use crate::qdict::{auto_precision, build_sign_oracle, OracleConfig, PolyObjective, QdictError};
use crate::qsim::{Circuit, Gate, QsimError, Statevector, MAX_QUBITS};

pub const DEFAULT_XI: f64 = 1.34;
pub const DEFAULT_CAP_PATIENCE: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroverError {
    #[error("invalid counts: {marked} marked out of {space}")]
    InvalidCounts { space: u128, marked: u128 },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("{n} variables plus a {m}-qubit value register exceed the {MAX_QUBITS}-qubit cap")]
    TooWide { n: usize, m: usize },
    #[error(transparent)]
    Qdict(#[from] QdictError),
    #[error(transparent)]
    Dicke(#[from] DickeError),
    #[error(transparent)]
    Sim(#[from] QsimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Dicke-state preparation and diffusion; every sample has weight `k`.
    Hard,
    /// Uniform superposition over all `2^n` strings with the penalty
    /// `lambda (sum_i x_i - k)^2` (scaled units) added to the objective.
    Soft { lambda: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleBackend {
    Circuit,
    Phase,
}

/// Everything needed to run Grover iterations for one objective.
#[derive(Clone, Debug)]
pub struct GroverPlan {
    pub n: usize,
    pub k: usize,
    pub mode: SearchMode,
    pub backend: OracleBackend,
    /// Searched objective; penalized in soft mode. Absent for planted tables.
    pub objective: Option<PolyObjective>,
    /// Searched values by basis index. In hard mode only weight-`k` entries
    /// are meaningful; the rest hold `i64::MAX`.
    values: Vec<i64>,
    /// Value-register width (0 for the phase backend).
    pub m: usize,
    pub state_prep: Circuit,
    pub diffusion: Circuit,
    /// `C(n, k)` in hard mode, `2^n` in soft mode.
    pub search_space: u128,
}

/// Oracle for a fixed threshold `y`.
#[derive(Clone, Debug)]
pub enum Oracle {
    Circuit { y: i64, circuit: Circuit },
    Phase { y: i64 },
}

impl Oracle {
    pub fn threshold(&self) -> i64 {
        match self {
            Oracle::Circuit { y, .. } | Oracle::Phase { y } => *y,
        }
    }
}

/// Adds `lambda (sum_i x_i - k)^2`, expanded on binaries as
/// `lambda [sum_i (1 - 2k) x_i + 2 sum_{i<j} x_i x_j + k^2]`.
pub fn build_soft_penalty_objective(
    base: &PolyObjective,
    k: usize,
    lambda: i64,
) -> Result<PolyObjective, GroverError> {
    if lambda <= 0 {
        return Err(GroverError::InvalidConfig(format!("penalty weight {lambda} must be positive")));
    }
    let n = base.n();
    let of = |v: Option<i64>| v.ok_or(QdictError::Overflow);
    let k = k as i64;
    let mut obj = base.clone();
    for i in 0..n {
        obj.add_term(&[i], of(lambda.checked_mul(1 - 2 * k))?)?;
        for j in i + 1..n {
            obj.add_term(&[i, j], of(lambda.checked_mul(2))?)?;
        }
    }
    obj.add_constant(of(lambda.checked_mul(k * k))?)?;
    Ok(obj)
}

/// `1 +` the width of the unpenalized objective's value interval over all corners.
pub fn default_soft_lambda(base: &PolyObjective) -> i64 {
    let (lo, hi) = base.value_bounds(None);
    hi.saturating_sub(lo).saturating_add(1)
}

fn uniform_prep(n: usize) -> Result<Circuit, QsimError> {
    let mut c = Circuit::new(n)?;
    for q in 0..n {
        c.push(Gate::Hadamard(q))?;
    }
    Ok(c)
}

/// `2|s><s| - I` up to global phase, with `|s>` the uniform superposition.
fn uniform_diffusion(n: usize) -> Result<Circuit, QsimError> {
    let mut c = uniform_prep(n)?;
    for q in 0..n {
        c.push(Gate::PauliX(q))?;
    }
    c.push(Gate::MultiControlledZ {
        controls: (0..n - 1).collect(),
        target: n - 1,
    })?;
    for q in 0..n {
        c.push(Gate::PauliX(q))?;
    }
    for q in 0..n {
        c.push(Gate::Hadamard(q))?;
    }
    Ok(c)
}

impl GroverPlan {
    /// Plan for minimizing `base` under `|x| = k`; in soft mode the penalty is
    /// added here.
    pub fn new(
        base: &PolyObjective,
        k: usize,
        mode: SearchMode,
        backend: OracleBackend,
    ) -> Result<Self, GroverError> {
        let n = base.n();
        let objective = match mode {
            SearchMode::Hard => base.clone(),
            SearchMode::Soft { lambda } => build_soft_penalty_objective(base, k, lambda)?,
        };
        let values = match mode {
            SearchMode::Hard => (0..1u64 << n)
                .map(|x| {
                    if x.count_ones() as usize == k {
                        objective.eval_scaled(BitString(x))
                    } else {
                        i64::MAX
                    }
                })
                .collect(),
            SearchMode::Soft { .. } => (0..1u64 << n).map(|x| objective.eval_scaled(BitString(x))).collect(),
        };
        let m = match backend {
            OracleBackend::Phase => 0,
            OracleBackend::Circuit => {
                let card = matches!(mode, SearchMode::Hard).then_some(k);
                let (lo, hi) = objective.value_bounds(card);
                // one unit of headroom keeps thresholds just below the range valid
                let m = auto_precision(lo.saturating_sub(1), hi)?;
                if n + m > MAX_QUBITS {
                    return Err(GroverError::TooWide { n, m });
                }
                m
            }
        };
        Self::assemble(n, k, mode, backend, Some(objective), values, m)
    }

    /// Phase-backend plan over an explicit value table of length `2^n`.
    pub fn from_values(n: usize, k: usize, mode: SearchMode, values: Vec<i64>) -> Result<Self, GroverError> {
        if values.len() != 1usize << n {
            return Err(GroverError::InvalidConfig(format!(
                "value table has {} entries, expected {}",
                values.len(),
                1usize << n
            )));
        }
        Self::assemble(n, k, mode, OracleBackend::Phase, None, values, 0)
    }

    fn assemble(
        n: usize,
        k: usize,
        mode: SearchMode,
        backend: OracleBackend,
        objective: Option<PolyObjective>,
        values: Vec<i64>,
        m: usize,
    ) -> Result<Self, GroverError> {
        if k > n {
            return Err(DickeError::CardinalityOutOfRange { n, k }.into());
        }
        let width = n + m;
        let (prep, diffusion, search_space) = match mode {
            SearchMode::Hard => (
                constrained_state_prep(n, k)?,
                build_constrained_diffusion(n, k)?,
                binomial(n, k),
            ),
            SearchMode::Soft { .. } => (uniform_prep(n)?, uniform_diffusion(n)?, 1u128 << n),
        };
        Ok(Self {
            n,
            k,
            mode,
            backend,
            objective,
            values,
            m,
            state_prep: prep.widened(width)?,
            diffusion: diffusion.widened(width)?,
            search_space,
        })
    }

    pub fn width(&self) -> usize {
        self.n + self.m
    }

    /// Searched value of `x` in scaled units.
    pub fn value(&self, x: BitString) -> i64 {
        self.values[x.0 as usize]
    }

    pub fn is_hard(&self) -> bool {
        matches!(self.mode, SearchMode::Hard)
    }

    /// Default rotation ceiling `ceil(pi/4 sqrt(|C|)) + 1`.
    pub fn rotation_cap(&self) -> usize {
        (PI / 4.0 * (self.search_space as f64).sqrt()).ceil() as usize + 1
    }

    pub fn oracle(&self, y: i64) -> Result<Oracle, GroverError> {
        match self.backend {
            OracleBackend::Phase => Ok(Oracle::Phase { y }),
            OracleBackend::Circuit => {
                let obj = self.objective.as_ref().expect("circuit plans carry an objective");
                let cfg = OracleConfig {
                    m: self.m,
                    y,
                    cardinality: self.is_hard().then_some(self.k),
                };
                Ok(Oracle::Circuit {
                    y,
                    circuit: build_sign_oracle(obj, &cfg)?,
                })
            }
        }
    }

    fn apply_oracle(&self, state: &mut Statevector, oracle: &Oracle) -> Result<(), GroverError> {
        match oracle {
            Oracle::Circuit { circuit, .. } => state.apply_circuit(circuit)?,
            Oracle::Phase { y } => {
                let mask = (1usize << self.n) - 1;
                let one = num_complex::Complex64::new(1.0, 0.0);
                state.apply_diagonal(|i| if self.values[i & mask] < *y { -one } else { one });
            }
        }
        Ok(())
    }

    /// Prepares the initial superposition and applies `r` oracle-diffusion
    /// rounds, calling `observe` after preparation and after every gate layer.
    pub fn evolve(
        &self,
        oracle: &Oracle,
        r: usize,
        mut observe: impl FnMut(&Statevector),
    ) -> Result<Statevector, GroverError> {
        let mut s = Statevector::zero(self.width())?;
        s.apply_circuit(&self.state_prep)?;
        observe(&s);
        for _ in 0..r {
            self.apply_oracle(&mut s, oracle)?;
            observe(&s);
            s.apply_circuit(&self.diffusion)?;
            observe(&s);
        }
        Ok(s)
    }

    pub fn variable_register(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}

/// Runs `r` Grover rotations and samples the variable register once.
pub fn grover_search<R: Rng + ?Sized>(
    plan: &GroverPlan,
    oracle: &Oracle,
    r: usize,
    rng: &mut R,
) -> Result<BitString, GroverError> {
    let s = plan.evolve(oracle, r, |_| {})?;
    Ok(BitString(s.sample_register(&plan.variable_register(), rng)? as u64))
}

/// Total probability on variable-register strings of weight other than `k`.
pub fn mass_outside_weight(state: &Statevector, n: usize, k: usize) -> f64 {
    let mask = (1usize << n) - 1;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| (i & mask).count_ones() as usize != k)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Subspace angle `a = arcsin(sqrt(M / |C|))`.
pub fn subspace_angle(space: u128, marked: u128) -> Result<f64, GroverError> {
    if marked == 0 || marked > space {
        return Err(GroverError::InvalidCounts { space, marked });
    }
    Ok((marked as f64 / space as f64).sqrt().asin())
}

/// Integer rotation count maximizing `sin^2((2r+1) a)`.
pub fn optimal_rotations(space: u128, marked: u128) -> Result<usize, GroverError> {
    let a = subspace_angle(space, marked)?;
    Ok((PI / (4.0 * a) - 0.5).round().max(0.0) as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasConfig {
    pub xi: f64,
    /// Rotation ceiling; `None` selects `ceil(pi/4 sqrt(|C|)) + 1`.
    pub r_cap: Option<usize>,
    pub max_oracle_queries: u64,
    pub cap_patience: usize,
    pub seed: u64,
}

impl Default for GasConfig {
    fn default() -> Self {
        Self {
            xi: DEFAULT_XI,
            r_cap: None,
            max_oracle_queries: 1_000_000,
            cap_patience: DEFAULT_CAP_PATIENCE,
            seed: 0,
        }
    }
}

impl GasConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), GroverError> {
        if !(self.xi > 1.0 && self.xi.is_finite()) {
            return Err(GroverError::InvalidConfig(format!("xi = {} must exceed 1", self.xi)));
        }
        if self.r_cap == Some(0) || self.max_oracle_queries == 0 || self.cap_patience == 0 {
            return Err(GroverError::InvalidConfig("caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasIteration {
    pub rotations: usize,
    pub threshold: i64,
    pub sample: BitString,
    pub value: i64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasResult {
    pub best_x: BitString,
    /// Scaled units of the searched objective.
    pub best_value: i64,
    pub oracle_queries: u64,
    /// Rotations summed over all Grover runs; one oracle call each.
    pub grover_rotations: u64,
    pub iterations: usize,
    /// False only in soft mode when no weight-`k` sample was ever seen.
    pub feasible: bool,
    pub budget_exhausted: bool,
    pub trace: Vec<GasIteration>,
}

fn random_start<R: Rng>(plan: &GroverPlan, rng: &mut R) -> BitString {
    if plan.is_hard() {
        BitString::from_indices(&sample(rng, plan.n, plan.k).into_vec())
    } else {
        BitString(rng.random_range(0..1u64 << plan.n))
    }
}

/// Randomized adaptive search: keep the best sample as threshold, draw the
/// rotation count uniformly from `{0, ..., ceil(r_max - 1)}`, reset `r_max`
/// to 1 on improvement and grow it by `xi` (up to the cap) otherwise.
///
/// Stops once `cap_patience` consecutive non-improving runs were made at the
/// cap, or when the next run would exceed the query budget.
pub fn gas_minimize(plan: &GroverPlan, cfg: &GasConfig) -> Result<GasResult, GroverError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r_cap = cfg.r_cap.unwrap_or_else(|| plan.rotation_cap()) as f64;
    let feasible = |x: BitString| x.weight() == plan.k;

    let mut best_x = random_start(plan, &mut rng);
    let mut y = plan.value(best_x);
    let mut found_feasible = feasible(best_x);
    let mut oracle = plan.oracle(y)?;
    let mut r_max = 1.0f64;
    let mut at_cap = 0;
    let mut queries = 0u64;
    let mut trace = Vec::new();
    let mut budget_exhausted = false;

    loop {
        let upper = (r_max - 1.0).ceil().max(0.0) as usize;
        let r = rng.random_range(0..=upper);
        if queries + r as u64 > cfg.max_oracle_queries {
            budget_exhausted = true;
            break;
        }
        let ran_at_cap = r_max >= r_cap;
        let x = grover_search(plan, &oracle, r, &mut rng)?;
        queries += r as u64;
        let v = plan.value(x);
        // infeasible soft-mode samples never become incumbents, except to
        // replace an infeasible start
        let accepted = v < y && (plan.is_hard() || feasible(x) || !found_feasible);
        trace.push(GasIteration {
            rotations: r,
            threshold: y,
            sample: x,
            value: v,
            accepted,
        });
        if accepted {
            best_x = x;
            y = v;
            found_feasible |= feasible(x);
            oracle = plan.oracle(y)?;
            r_max = 1.0;
            at_cap = 0;
        } else {
            r_max = (cfg.xi * r_max).min(r_cap);
            if ran_at_cap {
                at_cap += 1;
                if at_cap >= cfg.cap_patience {
                    break;
                }
            }
        }
    }
    Ok(GasResult {
        best_x,
        best_value: y,
        oracle_queries: queries,
        grover_rotations: queries,
        iterations: trace.len(),
        feasible: found_feasible,
        budget_exhausted,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::bits::Combinations;
    use crate::model::{brute_force_scaled, integer_bqpfc};

    fn planted(n: usize, k: usize, marked: &[BitString]) -> GroverPlan {
        let values = (0..1u64 << n)
            .map(|x| if marked.contains(&BitString(x)) { 0 } else { 1 })
            .collect();
        GroverPlan::from_values(n, k, SearchMode::Hard, values).unwrap()
    }

    fn marked_probability(s: &Statevector, marked: &[BitString]) -> f64 {
        marked.iter().map(|x| s.probability(x.0 as usize)).sum()
    }

    #[test]
    fn rotation_counts() {
        assert_eq!(optimal_rotations(6, 1).unwrap(), 1);
        let a = subspace_angle(6, 1).unwrap();
        let p = |r: usize| ((2 * r + 1) as f64 * a).sin().powi(2);
        assert!(p(1) > p(0) && p(1) > p(2) && p(1) > p(3));
        assert_eq!(optimal_rotations(9, 9).unwrap(), 0);
        assert_eq!(optimal_rotations(1 << 20, 1).unwrap(), 804);
        assert!(optimal_rotations(4, 0).is_err());
        assert!(optimal_rotations(4, 5).is_err());
    }

    #[test]
    fn zero_rotations_sample_the_dicke_state() {
        let plan = planted(4, 2, &[BitString(0b0011)]);
        let s = plan.evolve(&plan.oracle(1).unwrap(), 0, |_| {}).unwrap();
        for x in Combinations::new(4, 2) {
            assert!((s.probability(x.0 as usize) - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_marked_string_amplifies() {
        let marked = [BitString(0b0110)];
        let plan = planted(4, 2, &marked);
        let a = subspace_angle(6, 1).unwrap();
        let oracle = plan.oracle(1).unwrap();
        for r in 0..=6 {
            let s = plan.evolve(&oracle, r, |_| {}).unwrap();
            let want = ((2 * r + 1) as f64 * a).sin().powi(2);
            assert!((marked_probability(&s, &marked) - want).abs() < 1e-9, "r={r}");
        }
        let s = plan.evolve(&oracle, 1, |_| {}).unwrap();
        assert!((marked_probability(&s, &marked) - 0.9074).abs() < 1e-4);
    }

    #[test]
    fn all_marked_leaves_the_distribution_uniform() {
        let all: Vec<_> = Combinations::new(5, 2).collect();
        let plan = planted(5, 2, &all);
        let oracle = plan.oracle(1).unwrap();
        for r in 0..4 {
            let s = plan.evolve(&oracle, r, |_| {}).unwrap();
            for x in &all {
                assert!((s.probability(x.0 as usize) - 0.1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hard_mode_stays_in_the_subspace() {
        let inst = integer_bqpfc(7, 3, 3, 4).unwrap();
        let obj = inst.poly_objective().unwrap();
        for backend in [OracleBackend::Phase, OracleBackend::Circuit] {
            let plan = GroverPlan::new(&obj, 3, SearchMode::Hard, backend).unwrap();
            let (_, best, _) = brute_force_scaled(&obj, 3).unwrap();
            let oracle = plan.oracle(best + 3).unwrap();
            let mut worst: f64 = 0.0;
            plan.evolve(&oracle, 8, |s| worst = worst.max(mass_outside_weight(s, 7, 3)))
                .unwrap();
            assert!(worst < 1e-16, "{backend:?}: {worst}");
        }
    }

    #[test]
    fn backends_agree() {
        let inst = integer_bqpfc(5, 2, 3, 8).unwrap();
        let obj = inst.poly_objective().unwrap();
        for mode in [SearchMode::Hard, SearchMode::Soft { lambda: default_soft_lambda(&obj) }] {
            let phase = GroverPlan::new(&obj, 2, mode, OracleBackend::Phase).unwrap();
            let circ = GroverPlan::new(&obj, 2, mode, OracleBackend::Circuit).unwrap();
            let reg = phase.variable_register();
            let values: Vec<i64> = (0..32).map(|x| phase.value(BitString(x))).collect();
            let y = values.iter().filter(|&&v| v != i64::MAX).copied().max().unwrap();
            for r in 0..3 {
                let a = phase.evolve(&phase.oracle(y).unwrap(), r, |_| {}).unwrap();
                let b = circ.evolve(&circ.oracle(y).unwrap(), r, |_| {}).unwrap();
                let pa = a.register_probabilities(&reg).unwrap();
                let pb = b.register_probabilities(&reg).unwrap();
                for (u, v) in pa.iter().zip(&pb) {
                    assert!((u - v).abs() < 1e-9);
                }
                // the value register returns to |0>
                let anc: Vec<usize> = (5..circ.width()).collect();
                assert!((b.register_probabilities(&anc).unwrap()[0] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn soft_penalty_examples() {
        let zero = PolyObjective::new(3, 0);
        let pen = build_soft_penalty_objective(&zero, 1, 10).unwrap();
        assert_eq!(pen.eval_scaled(BitString(0b000)), 10);
        assert_eq!(pen.eval_scaled(BitString(0b111)), 40);
        for x in Combinations::new(3, 1) {
            assert_eq!(pen.eval_scaled(x), 0);
        }
        for n in 1..=6 {
            for k in 0..=n {
                let pen = build_soft_penalty_objective(&PolyObjective::new(n, 0), k, 1).unwrap();
                for x in 0..1u64 << n {
                    let w = BitString(x).weight() as i64;
                    assert_eq!(pen.eval_scaled(BitString(x)), (w - k as i64).pow(2));
                }
            }
        }
        assert!(build_soft_penalty_objective(&zero, 1, 0).is_err());
    }

    #[test]
    fn degenerate_objective_returns_a_feasible_string() {
        let mut obj = PolyObjective::new(4, 0);
        for i in 0..4 {
            obj.add_term(&[i], 1).unwrap();
        }
        let plan = GroverPlan::new(&obj, 2, SearchMode::Hard, OracleBackend::Circuit).unwrap();
        let res = gas_minimize(&plan, &GasConfig::with_seed(1)).unwrap();
        assert_eq!(res.best_x.weight(), 2);
        assert_eq!(res.best_value, 2);
        assert!(!res.budget_exhausted);
    }

    #[test]
    fn gas_bookkeeping() {
        let inst = integer_bqpfc(8, 3, 4, 21).unwrap();
        let obj = inst.poly_objective().unwrap();
        let plan = GroverPlan::new(&obj, 3, SearchMode::Hard, OracleBackend::Phase).unwrap();
        for seed in 0..10 {
            let res = gas_minimize(&plan, &GasConfig::with_seed(seed)).unwrap();
            assert_eq!(res.oracle_queries, res.trace.iter().map(|t| t.rotations as u64).sum::<u64>());
            assert!(res.trace.windows(2).all(|w| w[1].threshold <= w[0].threshold));
            assert!(res.trace.iter().all(|t| t.sample.weight() == 3));
            assert_eq!(res.best_value, obj.eval_scaled(res.best_x));
            let again = gas_minimize(&plan, &GasConfig::with_seed(seed)).unwrap();
            assert_eq!(res, again);
        }
    }

    #[test]
    fn gas_respects_the_budget() {
        let inst = integer_bqpfc(8, 3, 4, 2).unwrap();
        let plan = GroverPlan::new(&inst.poly_objective().unwrap(), 3, SearchMode::Hard, OracleBackend::Phase).unwrap();
        let cfg = GasConfig {
            max_oracle_queries: 3,
            ..GasConfig::with_seed(5)
        };
        let res = gas_minimize(&plan, &cfg).unwrap();
        assert!(res.budget_exhausted);
        assert!(res.oracle_queries <= 3);
        assert!(gas_minimize(&plan, &GasConfig { xi: 1.0, ..cfg }).is_err());
    }

    #[test]
    fn soft_gas_returns_feasible_incumbents() {
        let inst = integer_bqpfc(6, 2, 3, 9).unwrap();
        let obj = inst.poly_objective().unwrap();
        let lambda = default_soft_lambda(&obj);
        let plan = GroverPlan::new(&obj, 2, SearchMode::Soft { lambda }, OracleBackend::Phase).unwrap();
        let (_, best, _) = brute_force_scaled(&obj, 2).unwrap();
        let mut hits = 0;
        for seed in 0..20 {
            let res = gas_minimize(&plan, &GasConfig::with_seed(seed)).unwrap();
            if res.feasible {
                assert_eq!(res.best_x.weight(), 2);
                assert_eq!(res.best_value, obj.eval_scaled(res.best_x));
            }
            hits += (res.best_value == best) as usize;
        }
        assert!(hits >= 18, "{hits}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn rotation_analytics(n in 3usize..=8, k_frac in 0.2f64..0.8, m_pick in 0usize..3, seed in any::<u64>()) {
            let k = ((n as f64 * k_frac).round() as usize).clamp(1, n - 1);
            let feasible: Vec<_> = Combinations::new(n, k).collect();
            let m = [1usize, 2, 4][m_pick].min(feasible.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let marked: Vec<_> = sample(&mut rng, feasible.len(), m).into_iter().map(|i| feasible[i]).collect();
            let plan = planted(n, k, &marked);
            let a = subspace_angle(feasible.len() as u128, m as u128).unwrap();
            let r_star = PI / (4.0 * a);
            let oracle = plan.oracle(1).unwrap();
            for r in 0..=(3.0 * r_star) as usize {
                let s = plan.evolve(&oracle, r, |_| {}).unwrap();
                let want = ((2 * r + 1) as f64 * a).sin().powi(2);
                prop_assert!((marked_probability(&s, &marked) - want).abs() < 1e-9);
            }
        }

        #[test]
        fn hard_to_soft_rotation_ratio(n in 10usize..=40, k in 2usize..=6, m_pick in 0usize..3) {
            let m = [1u128, 2, 4][m_pick];
            let c = binomial(n, k);
            // rounding to an integer count dominates unless the count is large
            prop_assume!(c / m >= 400);
            let hard = optimal_rotations(c, m).unwrap() as f64;
            let soft = optimal_rotations(1u128 << n, m).unwrap() as f64;
            let want = (c as f64 / 2f64.powi(n as i32)).sqrt();
            prop_assert!((hard / soft / want - 1.0).abs() < 0.05);
        }
    }
}
