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

//! Closed-form resource estimates: controlled rotations per oracle, Grover
//! rotation counts, total query counts and decomposition costs.
//!
//! Counts with an exact formula are reported as such. Asymptotic forms are
//! evaluated with unit constants and labelled as order estimates.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::binomial;
use crate::dicke::{dicke_block_counts, dicke_gates, DickeError};

pub const ORDER_ESTIMATE: &str = "order estimate";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResourceError {
    #[error("unsupported objective degree {0}; expected 2 or 4")]
    UnsupportedDegree(usize),
    #[error("invalid counts: {marked} marked out of {space}")]
    InvalidCounts { space: u128, marked: u128 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Dicke(#[from] DickeError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleGateCounts {
    /// Controlled rotations keyed by control count.
    pub per_degree: BTreeMap<usize, u128>,
    /// `m log2 m` Toffolis for the inverse QFT (order estimate).
    pub iqft_toffoli_estimate: f64,
}

/// Controlled rotations in one dense quantum-dictionary oracle:
/// `m C(n, d)` rotations with `d` controls for every degree `d` up to `degree`.
pub fn oracle_gate_counts(n: usize, m: usize, degree: usize) -> Result<OracleGateCounts, ResourceError> {
    if degree != 2 && degree != 4 {
        return Err(ResourceError::UnsupportedDegree(degree));
    }
    if n == 0 || m == 0 {
        return Err(ResourceError::InvalidArgument("n and m must be positive".into()));
    }
    let per_degree = (1..=degree).map(|d| (d, m as u128 * binomial(n, d))).collect();
    Ok(OracleGateCounts {
        per_degree,
        iqft_toffoli_estimate: m as f64 * (m as f64).log2(),
    })
}

/// `H_2(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    h(p) + h(1.0 - p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationEstimates {
    /// `pi/4 sqrt(C(n,k)/M)`.
    pub hard: f64,
    /// `pi/4 sqrt(2^n/M)`.
    pub soft: f64,
    /// `sqrt(C(n,k)/2^n)`.
    pub ratio: f64,
    /// `H_2(k/n)`, the exponent in `C(n,k) <= 2^{n H_2(k/n)}`.
    pub entropy_exponent: f64,
}

pub fn grover_iteration_estimates(n: usize, k: usize, marked: u128) -> Result<IterationEstimates, ResourceError> {
    let space = binomial(n, k);
    if marked == 0 || marked > space {
        return Err(ResourceError::InvalidCounts { space, marked });
    }
    let c = space as f64;
    let full = 2f64.powi(n as i32);
    let m = marked as f64;
    Ok(IterationEstimates {
        hard: PI / 4.0 * (c / m).sqrt(),
        soft: PI / 4.0 * (full / m).sqrt(),
        ratio: (c / full).sqrt(),
        entropy_exponent: if n == 0 { 0.0 } else { binary_entropy(k as f64 / n as f64) },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryEstimates {
    /// `sqrt(C(n,k)) n^6 k^{3/2} / (sqrt(M) eps^2 delta)`.
    pub admm_gas_hard: f64,
    /// `2^{n/2} / sqrt(M)`.
    pub qd_gas: f64,
    /// Set when `k = 0` makes the hybrid estimate vanish.
    pub degenerate: bool,
}

fn check_tolerances(epsilon: f64, delta: f64) -> Result<(), ResourceError> {
    for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(ResourceError::InvalidTolerance(format!("{name} = {v} not in (0, 1)")));
        }
    }
    Ok(())
}

/// Total oracle-query order estimates for the hybrid and direct approaches.
pub fn total_query_estimate(
    n: usize,
    k: usize,
    marked: u128,
    epsilon: f64,
    delta: f64,
) -> Result<QueryEstimates, ResourceError> {
    check_tolerances(epsilon, delta)?;
    let space = binomial(n, k);
    if marked == 0 || marked > space {
        return Err(ResourceError::InvalidCounts { space, marked });
    }
    let m = (marked as f64).sqrt();
    let admm = (space as f64).sqrt() * (n as f64).powi(6) * (k as f64).powf(1.5) / (m * epsilon * epsilon * delta);
    Ok(QueryEstimates {
        admm_gas_hard: admm,
        qd_gas: 2f64.powf(n as f64 / 2.0) / m,
        degenerate: k == 0,
    })
}

/// Smallest `n` in `k..=n_max` from which the hybrid estimate stays below the
/// direct one for every larger `n` in range.
pub fn query_crossover(k: usize, marked: u128, epsilon: f64, delta: f64, n_max: usize) -> Result<Option<usize>, ResourceError> {
    check_tolerances(epsilon, delta)?;
    let mut crossover = None;
    for n in k.max(1)..=n_max {
        if binomial(n, k) < marked {
            crossover = None;
            continue;
        }
        let q = total_query_estimate(n, k, marked, epsilon, delta)?;
        if q.admm_gas_hard < q.qd_gas {
            crossover.get_or_insert(n);
        } else {
            crossover = None;
        }
    }
    Ok(crossover)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionEstimate {
    /// `log2(d)^3`.
    pub depth: f64,
    /// `d log2(d)^4`.
    pub gates: f64,
}

/// Cost of one `d`-controlled gate on hardware, unit constants.
pub fn decomposition_estimates(d: usize) -> Result<DecompositionEstimate, ResourceError> {
    if d < 2 {
        return Err(ResourceError::InvalidArgument(format!("control count {d} below 2")));
    }
    let l = (d as f64).log2();
    Ok(DecompositionEstimate {
        depth: l.powi(3),
        gates: d as f64 * l.powi(4),
    })
}

/// Gate count and greedy-layered depth of `U^dagger X C^{n-1}Z X U`, computed
/// from qubit supports so it works past the simulator width.
fn constrained_diffusion_shape(n: usize, k: usize) -> Result<(u128, usize), ResourceError> {
    let blocks: Vec<Vec<usize>> = dicke_gates(n, k)?.iter().map(|g| g.qubits()).collect();
    let flips: Vec<Vec<usize>> = (k..n).map(|q| vec![q]).collect();
    let mcz = vec![(0..n).collect::<Vec<_>>()];
    let seq = blocks
        .iter()
        .rev()
        .chain(&flips)
        .chain(&mcz)
        .chain(&flips)
        .chain(&blocks);
    let mut level = vec![0usize; n];
    let (mut count, mut depth) = (0u128, 0usize);
    for qs in seq {
        let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in qs {
            level[q] = l;
        }
        depth = depth.max(l);
        count += 1;
    }
    Ok((count, depth))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Direct search on the quartic objective with a cardinality penalty.
    QdGasSoft,
    /// Hybrid ADMM whose quadratic binary block uses the Dicke-constrained search.
    AdmmGasHard,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub method: Method,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub per_oracle_gates: BTreeMap<usize, u128>,
    pub iqft_toffoli_estimate: f64,
    /// Gates in one diffusion operator.
    pub diffusion_gates: u128,
    pub diffusion_depth: usize,
    /// `(two_qubit, three_qubit)` split blocks in the Dicke unitary (hard mode).
    pub dicke_blocks: Option<(usize, usize)>,
    pub grover_rotations: f64,
    pub total_oracle_queries: f64,
    pub admm_iterations: Option<f64>,
    /// Largest control count in the oracle and its decomposition estimate.
    pub largest_control_decomposition: DecompositionEstimate,
    /// Fields holding unit-constant asymptotic evaluations.
    pub order_estimates: Vec<String>,
}

pub fn build_report(
    method: Method,
    n: usize,
    k: usize,
    m: usize,
    marked: u128,
    epsilon: f64,
    delta: f64,
) -> Result<ResourceReport, ResourceError> {
    let iters = grover_iteration_estimates(n, k, marked)?;
    let queries = total_query_estimate(n, k, marked, epsilon, delta)?;
    let degree = match method {
        Method::QdGasSoft => 4,
        Method::AdmmGasHard => 2,
    };
    let gates = oracle_gate_counts(n, m, degree)?;
    let mut order = vec!["iqft_toffoli_estimate", "total_oracle_queries", "largest_control_decomposition"];
    let report = match method {
        Method::QdGasSoft => ResourceReport {
            method,
            n,
            k,
            m,
            per_oracle_gates: gates.per_degree,
            iqft_toffoli_estimate: gates.iqft_toffoli_estimate,
            // H, X, C^{n-1}Z, X, H layers
            diffusion_gates: 4 * n as u128 + 1,
            diffusion_depth: 5,
            dicke_blocks: None,
            grover_rotations: iters.soft,
            total_oracle_queries: queries.qd_gas,
            admm_iterations: None,
            largest_control_decomposition: decomposition_estimates(degree)?,
            order_estimates: vec![],
        },
        Method::AdmmGasHard => {
            let (two, three) = dicke_block_counts(n, k);
            let (gates_u, depth) = constrained_diffusion_shape(n, k)?;
            order.push("admm_iterations");
            ResourceReport {
                method,
                n,
                k,
                m,
                per_oracle_gates: gates.per_degree,
                iqft_toffoli_estimate: gates.iqft_toffoli_estimate,
                // U^dagger, X on the zero positions, C^{n-1}Z, X, U
                diffusion_gates: gates_u,
                diffusion_depth: depth,
                dicke_blocks: Some((two, three)),
                grover_rotations: iters.hard,
                total_oracle_queries: queries.admm_gas_hard,
                admm_iterations: Some(
                    (n as f64).powi(6) * (k as f64).powf(1.5) / (epsilon * epsilon * delta),
                ),
                largest_control_decomposition: decomposition_estimates(degree)?,
                order_estimates: vec![],
            }
        }
    };
    Ok(ResourceReport {
        order_estimates: order.into_iter().map(|s| format!("{s}: {ORDER_ESTIMATE}")).collect(),
        ..report
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::bits::Combinations;
    use crate::dicke::build_constrained_diffusion;
    use crate::qdict::{build_encoder_stages, OracleConfig, PolyObjective};

    #[test]
    fn dense_oracle_counts() {
        let c = oracle_gate_counts(4, 3, 2).unwrap();
        assert_eq!(c.per_degree, BTreeMap::from([(1, 12), (2, 18)]));
        let c = oracle_gate_counts(4, 3, 4).unwrap();
        assert_eq!(c.per_degree, BTreeMap::from([(1, 12), (2, 18), (3, 12), (4, 3)]));
        let c = oracle_gate_counts(1, 5, 2).unwrap();
        assert_eq!(c.per_degree, BTreeMap::from([(1, 5), (2, 0)]));
        let c = oracle_gate_counts(20, 8, 2).unwrap();
        assert_eq!(c.per_degree, BTreeMap::from([(1, 160), (2, 1520)]));
        assert_eq!(c.iqft_toffoli_estimate, 24.0);
        assert_eq!(oracle_gate_counts(4, 3, 3).unwrap_err(), ResourceError::UnsupportedDegree(3));
    }

    #[test]
    fn simulated_oracles_match_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for (n, m) in [(4, 3), (6, 4), (8, 4)] {
            for degree in [2, 4] {
                let mut obj = PolyObjective::new(n, 0);
                for d in 1..=degree {
                    for s in Combinations::new(n, d) {
                        obj.add_term(&s.indices(), rng.random_range(1..=5)).unwrap();
                    }
                }
                let cfg = OracleConfig {
                    m,
                    y: 0,
                    cardinality: Some(0),
                };
                let recorded = build_encoder_stages(&obj, &cfg).unwrap().phase_stage.controlled_rotation_counts();
                let want = oracle_gate_counts(n, m, degree).unwrap().per_degree;
                let recorded: BTreeMap<usize, u128> = recorded.into_iter().map(|(d, c)| (d, c as u128)).collect();
                assert_eq!(recorded, want);
            }
        }
    }

    #[test]
    fn iteration_estimates() {
        let e = grover_iteration_estimates(20, 2, 1).unwrap();
        assert!((e.hard - 10.826).abs() < 1e-3);
        assert!((e.soft - 804.248).abs() < 1e-3);
        assert!((e.hard / e.soft - e.ratio).abs() < 1e-12);
        let e = grover_iteration_estimates(7, 7, 1).unwrap();
        assert!((e.hard - PI / 4.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!(grover_iteration_estimates(5, 2, 11).is_err());
        for n in 1..=30 {
            for k in 0..=n {
                let e = grover_iteration_estimates(n, k, 1).unwrap();
                let want = (binomial(n, k) as f64 / 2f64.powi(n as i32)).sqrt();
                assert!((e.hard / e.soft - want).abs() < 1e-12);
                assert!(binomial(n, k) as f64 <= 2f64.powf(n as f64 * e.entropy_exponent) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn query_estimates() {
        let q = total_query_estimate(30, 3, 1, 0.1, 0.1).unwrap();
        let want = (4060f64).sqrt() * 30f64.powi(6) * 3f64.powf(1.5) / (0.01 * 0.1);
        assert!((q.admm_gas_hard / want - 1.0).abs() < 1e-12);
        assert_eq!(q.qd_gas, 2f64.powi(15));
        assert!(!q.degenerate);

        let q = total_query_estimate(9, 0, 1, 0.1, 0.1).unwrap();
        assert_eq!(q.admm_gas_hard, 0.0);
        assert!(q.degenerate);

        let (n, k) = (10, 3);
        let c = binomial(n, k);
        let q = total_query_estimate(n, k, c, 0.2, 0.5).unwrap();
        let want = (n as f64).powi(6) * (k as f64).powf(1.5) / (0.04 * 0.5);
        assert!((q.admm_gas_hard / want - 1.0).abs() < 1e-12);
        assert!(total_query_estimate(10, 3, 1, 1.0, 0.1).is_err());
    }

    #[test]
    fn crossover_is_where_the_curves_cross() {
        let n_star = query_crossover(3, 1, 0.1, 0.1, 200).unwrap().unwrap();
        let at = |n| total_query_estimate(n, 3, 1, 0.1, 0.1).unwrap();
        assert!(at(n_star).admm_gas_hard < at(n_star).qd_gas);
        assert!(at(n_star - 1).admm_gas_hard >= at(n_star - 1).qd_gas);
        assert_eq!(query_crossover(3, 1, 0.1, 0.1, 20).unwrap(), None);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decomposition_estimates(2).unwrap(), DecompositionEstimate { depth: 1.0, gates: 2.0 });
        assert_eq!(
            decomposition_estimates(16).unwrap(),
            DecompositionEstimate {
                depth: 64.0,
                gates: 4096.0
            }
        );
        let mut prev = decomposition_estimates(2).unwrap();
        for d in 3..200 {
            let e = decomposition_estimates(d).unwrap();
            assert!(e.depth > prev.depth && e.gates > prev.gates);
            prev = e;
        }
        assert!(decomposition_estimates(1).is_err());
    }

    #[test]
    fn reports_match_built_circuits() {
        for (n, k) in [(6, 2), (8, 3), (5, 5)] {
            let r = build_report(Method::AdmmGasHard, n, k, 6, 1, 0.1, 0.1).unwrap();
            let a = build_constrained_diffusion(n, k).unwrap();
            assert_eq!(r.diffusion_gates, a.len() as u128);
            assert_eq!(r.diffusion_depth, a.depth());
            assert!(r.order_estimates.iter().all(|s| s.ends_with(ORDER_ESTIMATE)));
        }
        let r = build_report(Method::QdGasSoft, 6, 2, 6, 1, 0.1, 0.1).unwrap();
        assert_eq!(r.per_oracle_gates.len(), 4);
        let json = serde_json::to_string(&r).unwrap();
        let back: ResourceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
