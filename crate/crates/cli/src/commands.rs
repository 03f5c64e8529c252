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

use cardgas::admm::{admm_solve, default_t_max, select_parameters, AdmmConfig, AdmmResult, Termination, X1Solver};
use cardgas::bits::{binomial, BitString, Combinations};
use cardgas::dicke::prepare_constrained_superposition;
use cardgas::grover::{
    default_soft_lambda, gas_minimize, mass_outside_weight, optimal_rotations, subspace_angle, GasConfig, GasResult,
    GroverError, GroverPlan, OracleBackend, SearchMode,
};
use cardgas::model::{
    brute_force_scaled, load_instance, shrink_covariance, synthetic_bqpfc, BqpFcInstance, RiskParityInstance,
};
use cardgas::resources::{
    build_report, grover_iteration_estimates, oracle_gate_counts, query_crossover, total_query_estimate, Method,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    AdmmArgs, BackendArg, CompareArgs, DickeArgs, GasArgs, GasOptions, GroverArgs, InstanceArgs, ModeArg, ResourceArgs,
    SearchArgs, SolverArg,
};

/// Widest register `--backend auto` will simulate gate by gate.
pub const AUTO_CIRCUIT_WIDTH: usize = 14;
const DEFAULT_LAMBDA: f64 = 1.0;

pub type Failure = String;

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub resolved: Value,
    pub warnings: Vec<String>,
    /// File name and contents of each CSV trace.
    pub traces: Vec<(String, Vec<u8>)>,
    pub budget_exhausted: bool,
    pub check_failed: bool,
}

fn err<E: std::fmt::Display>(e: E) -> Failure {
    e.to_string()
}

struct Loaded {
    inst: BqpFcInstance,
    lambda: Option<f64>,
    source: Value,
}

fn load(args: &InstanceArgs, seed: u64, repeat: usize) -> Result<Loaded, Failure> {
    let (inst, lambda, source) = match (&args.instance, args.synth.is_empty()) {
        (Some(path), true) => {
            let (inst, lambda) = load_instance(path).map_err(err)?;
            (inst, lambda, json!({ "file": path }))
        }
        (None, false) => {
            let get = |key: &str| args.synth.iter().rev().find(|p| p.key == key).map(|p| p.value);
            let n = get("n").ok_or("--synth needs n=<assets>")? as usize;
            let k = get("k").ok_or("--synth needs k=<cardinality>")? as usize;
            let s = get("seed").unwrap_or(seed).wrapping_add(repeat as u64);
            (synthetic_bqpfc(n, k, s).map_err(err)?, None, json!({ "synth": { "n": n, "k": k, "seed": s } }))
        }
        (Some(_), false) => return Err("give either --instance or --synth, not both".into()),
        (None, true) => return Err("an instance is required: --instance <file> or --synth n=<n> k=<k>".into()),
    };
    let inst = match args.rho {
        Some(rho) => {
            let sigma = shrink_covariance(&inst.sigma, rho).map_err(err)?;
            BqpFcInstance::new(inst.k, sigma, inst.mu).map_err(err)?
        }
        None => inst,
    };
    Ok(Loaded { inst, lambda, source })
}

fn plan_for(inst: &BqpFcInstance, search: &SearchArgs, warnings: &mut Vec<String>) -> Result<GroverPlan, Failure> {
    let base = inst.poly_objective().map_err(err)?;
    let mode = match search.mode {
        ModeArg::Hard => SearchMode::Hard,
        ModeArg::Soft => SearchMode::Soft {
            lambda: search.penalty.unwrap_or_else(|| default_soft_lambda(&base)),
        },
    };
    let build = |backend| GroverPlan::new(&base, inst.k, mode, backend).map_err(err);
    match search.backend {
        BackendArg::Circuit => build(OracleBackend::Circuit),
        BackendArg::Phase => build(OracleBackend::Phase),
        BackendArg::Auto => match GroverPlan::new(&base, inst.k, mode, OracleBackend::Circuit) {
            Ok(plan) if plan.width() <= AUTO_CIRCUIT_WIDTH => Ok(plan),
            Ok(plan) => {
                warnings.push(format!(
                    "register width {} exceeds {AUTO_CIRCUIT_WIDTH}; using the phase oracle",
                    plan.width()
                ));
                build(OracleBackend::Phase)
            }
            Err(e) => match e {
                GroverError::TooWide { .. } => {
                    warnings.push(format!("{e}; using the phase oracle"));
                    build(OracleBackend::Phase)
                }
                e => Err(err(e)),
            },
        },
    }
}

fn gas_config(opts: &GasOptions, seed: u64) -> GasConfig {
    GasConfig {
        xi: opts.xi,
        r_cap: opts.r_cap,
        max_oracle_queries: opts.max_queries,
        cap_patience: opts.cap_patience,
        seed,
    }
}

fn check_repeats(repeats: usize) -> Result<(), Failure> {
    if repeats == 0 {
        return Err("--repeats must be at least 1".into());
    }
    Ok(())
}

#[derive(Serialize)]
struct GasTraceRow {
    iteration: usize,
    rotations: usize,
    threshold: i64,
    sample: String,
    value: i64,
    accepted: bool,
}

fn gas_trace_csv(res: &GasResult, n: usize) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, it) in res.trace.iter().enumerate() {
        w.serialize(GasTraceRow {
            iteration: i,
            rotations: it.rotations,
            threshold: it.threshold,
            sample: it.sample.render(n),
            value: it.value,
            accepted: it.accepted,
        })
        .map_err(err)?;
    }
    w.into_inner().map_err(err)
}

pub fn dicke_check(args: &DickeArgs) -> Result<Outcome, Failure> {
    let (n, k) = (args.n, args.k);
    let state = prepare_constrained_superposition(n, k).map_err(err)?;
    let target = 1.0 / (binomial(n, k) as f64).sqrt();
    let mut inside = 0.0f64;
    let mut outside = 0.0f64;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if (i as u64).count_ones() as usize == k {
            inside = inside.max((a - target).norm());
        } else {
            outside = outside.max(a.norm());
        }
    }
    let deviation = inside.max(outside);
    let pass = deviation < args.tolerance;
    Ok(Outcome {
        results: json!({
            "status": if pass { "PASS" } else { "FAIL" },
            "max_amplitude_deviation": deviation,
            "max_weight_k_deviation": inside,
            "max_amplitude_outside": outside,
            "support": binomial(n, k),
        }),
        check_failed: !pass,
        ..Outcome::default()
    })
}

pub fn grover(args: &GroverArgs) -> Result<Outcome, Failure> {
    let mut warnings = Vec::new();
    let loaded = load(&args.instance, args.seed, 0)?;
    let plan = plan_for(&loaded.inst, &args.search, &mut warnings)?;
    let n = plan.n;
    let domain: Vec<BitString> = if plan.is_hard() {
        Combinations::new(n, plan.k).collect()
    } else {
        (0..1u64 << n).map(BitString).collect()
    };
    let optimum = domain.iter().map(|&x| plan.value(x)).min().ok_or("empty search space")?;
    let y = args.threshold.unwrap_or(optimum + 1);
    let marked: Vec<BitString> = domain.iter().copied().filter(|&x| plan.value(x) < y).collect();
    let m = marked.len() as u128;
    if m == 0 {
        warnings.push(format!("threshold {y} marks no string"));
    }
    let r = match args.rotations {
        Some(r) => r,
        None if m > 0 => optimal_rotations(plan.search_space, m).map_err(err)?,
        None => 0,
    };
    let oracle = plan.oracle(y).map_err(err)?;
    let mut leak = 0.0f64;
    let hard = plan.is_hard();
    let state = plan
        .evolve(&oracle, r, |s| {
            if hard {
                leak = leak.max(mass_outside_weight(s, n, plan.k));
            }
        })
        .map_err(err)?;
    let register = plan.variable_register();
    let probs = state.register_probabilities(&register).map_err(err)?;
    let simulated: f64 = marked.iter().map(|x| probs[x.0 as usize]).sum();
    let predicted = if m > 0 {
        let a = subspace_angle(plan.search_space, m).map_err(err)?;
        Some(((2 * r + 1) as f64 * a).sin().powi(2))
    } else {
        None
    };
    let shots: Vec<String> = state
        .sample_shots(&register, args.shots, args.seed)
        .map_err(err)?
        .into_iter()
        .map(|x| BitString(x as u64).render(n))
        .collect();
    Ok(Outcome {
        results: json!({
            "instance": loaded.source,
            "threshold": y,
            "optimum": optimum,
            "marked": m,
            "search_space": plan.search_space,
            "rotations": r,
            "marked_probability": simulated,
            "predicted_probability": predicted,
            "max_mass_outside_weight": hard.then_some(leak),
            "samples": shots,
        }),
        resolved: json!({ "backend": plan.backend, "mode": plan.mode, "m": plan.m, "width": plan.width() }),
        warnings,
        ..Outcome::default()
    })
}

pub fn gas(args: &GasArgs) -> Result<Outcome, Failure> {
    check_repeats(args.repeats)?;
    let runs: Vec<Result<_, Failure>> = (0..args.repeats)
        .into_par_iter()
        .map(|i| {
            let mut warnings = Vec::new();
            let loaded = load(&args.instance, args.seed, i)?;
            let plan = plan_for(&loaded.inst, &args.search, &mut warnings)?;
            let seed = args.seed.wrapping_add(i as u64);
            let res = gas_minimize(&plan, &gas_config(&args.gas, seed)).map_err(err)?;
            let csv = gas_trace_csv(&res, plan.n)?;
            Ok((loaded, plan, seed, res, csv, warnings))
        })
        .collect();

    let mut out = Outcome::default();
    let mut results = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let (loaded, plan, seed, res, csv, warnings) = run?;
        out.warnings.extend(warnings.into_iter().map(|w| format!("repeat {i}: {w}")));
        if res.budget_exhausted {
            out.budget_exhausted = true;
            out.warnings.push(format!("repeat {i}: query budget exhausted"));
        }
        if !res.feasible {
            out.warnings.push(format!("repeat {i}: no weight-{} sample found", plan.k));
        }
        let scale = plan.objective.as_ref().map_or(1.0, |o| o.scale());
        results.push(json!({
            "repeat": i,
            "seed": seed,
            "instance": loaded.source,
            "best_x": res.best_x.render(plan.n),
            "best_value_scaled": res.best_value,
            "best_value": res.best_value as f64 / scale,
            "oracle_queries": res.oracle_queries,
            "grover_rotations": res.grover_rotations,
            "iterations": res.iterations,
            "feasible": res.feasible,
            "budget_exhausted": res.budget_exhausted,
            "backend": plan.backend,
            "mode": plan.mode,
            "m": plan.m,
        }));
        out.traces.push((format!("gas_trace_{i}.csv"), csv));
    }
    out.results = json!({ "runs": results });
    Ok(out)
}

fn admm_once(args: &AdmmArgs, i: usize, warnings: &mut Vec<String>) -> Result<(Value, AdmmResult, Value), Failure> {
    let loaded = load(&args.instance, args.seed, i)?;
    let lambda = args.lambda.or(loaded.lambda).unwrap_or(DEFAULT_LAMBDA);
    let inst = RiskParityInstance::new(loaded.inst, lambda).map_err(err)?;
    let (n, k) = (inst.n(), inst.k());
    let (zeta, beta) = match (args.zeta, args.beta) {
        (Some(z), Some(b)) => (z, b),
        (Some(z), None) => (z, args.c5 * z),
        (None, _) => {
            let (z, b) = select_parameters(&inst, args.epsilon, args.delta, args.c4_margin, args.c5).map_err(err)?;
            (z, args.beta.unwrap_or(b))
        }
    };
    let x1_solver = match args.solver {
        SolverArg::BruteForce => X1Solver::BruteForce,
        SolverArg::GasHard => {
            let backend = match args.backend {
                BackendArg::Circuit => OracleBackend::Circuit,
                // subproblem coefficients change every iteration, so the
                // register width is not known up front
                BackendArg::Phase | BackendArg::Auto => OracleBackend::Phase,
            };
            X1Solver::GasHard {
                gas: gas_config(&args.gas, 0),
                backend,
            }
        }
    };
    let cfg = AdmmConfig {
        epsilon: args.epsilon,
        delta: args.delta,
        zeta,
        beta,
        t_max: args.t_max.unwrap_or_else(|| default_t_max(n, k, args.epsilon, args.delta)),
        x1_solver,
    };
    let seed = args.seed.wrapping_add(i as u64);
    let res = admm_solve(&inst, &cfg, seed).map_err(err)?;
    for r in &res.records {
        if !(r.identity_ok && r.descent_ok && r.lower_bound_ok) {
            warnings.push(format!(
                "iteration {}: monitor violation (identity {}, descent {}, lower bound {})",
                r.t, r.identity_ok, r.descent_ok, r.lower_bound_ok
            ));
        }
    }
    for g in &res.gaps {
        warnings.push(format!(
            "iteration {}: subproblem gap {} (found {}, optimum {})",
            g.t,
            g.found - g.optimum,
            g.found,
            g.optimum
        ));
    }
    for t in &res.budget_events {
        warnings.push(format!("iteration {t}: subproblem search hit its query budget"));
    }
    let resolved = json!({
        "lambda": lambda,
        "zeta": zeta,
        "beta": beta,
        "t_max": cfg.t_max,
        "stop_threshold": cfg.stop_threshold(),
        "x1_solver": cfg.x1_solver,
        "c1": inst.c1,
        "c2": inst.c2,
        "c3": inst.c3,
    });
    let summary = json!({
        "repeat": i,
        "seed": seed,
        "instance": loaded.source,
        "x1_final": res.x1_final.render(n),
        "x2_final": res.final_state.x2.as_slice(),
        "termination": res.termination,
        "iterations": res.iterations,
        "consistency": res.consistency(),
        "consistency_bound": args.epsilon + args.delta,
        "solver_queries": res.solver_queries,
        "monitors_ok": res.records.iter().all(|r| r.identity_ok && r.descent_ok && r.lower_bound_ok),
        "resolved": resolved,
    });
    Ok((summary, res, resolved))
}

pub fn admm(args: &AdmmArgs) -> Result<Outcome, Failure> {
    check_repeats(args.repeats)?;
    let runs: Vec<Result<_, Failure>> = (0..args.repeats)
        .into_par_iter()
        .map(|i| {
            let mut warnings = Vec::new();
            let (summary, res, resolved) = admm_once(args, i, &mut warnings)?;
            let mut csv = Vec::new();
            res.write_trace_csv(&mut csv).map_err(err)?;
            Ok((summary, res, resolved, csv, warnings))
        })
        .collect();

    let mut out = Outcome::default();
    let mut results = Vec::new();
    for (i, run) in runs.into_iter().enumerate() {
        let (summary, res, resolved, csv, warnings) = run?;
        out.warnings.extend(warnings.into_iter().map(|w| format!("repeat {i}: {w}")));
        if res.termination == Termination::MaxIterations {
            out.budget_exhausted = true;
            out.warnings.push(format!("repeat {i}: stopped at the iteration limit"));
        }
        if i == 0 {
            out.resolved = resolved;
        }
        results.push(summary);
        out.traces.push((format!("admm_trace_{i}.csv"), csv));
    }
    out.results = json!({ "runs": results });
    Ok(out)
}

pub fn resources(args: &ResourceArgs) -> Result<Outcome, Failure> {
    let (n, k, m) = (args.n, args.k, args.m);
    let degree2 = oracle_gate_counts(n, m, 2).map_err(err)?;
    let degree4 = oracle_gate_counts(n, m, 4).map_err(err)?;
    let iters = grover_iteration_estimates(n, k, args.marked).map_err(err)?;
    let queries = total_query_estimate(n, k, args.marked, args.epsilon, args.delta).map_err(err)?;
    let crossover = query_crossover(k, args.marked, args.epsilon, args.delta, args.n_max).map_err(err)?;
    let report = |method| build_report(method, n, k, m, args.marked, args.epsilon, args.delta).map_err(err);
    let mut warnings = Vec::new();
    if queries.degenerate {
        warnings.push("k = 0: the hybrid query estimate is degenerate".into());
    }
    Ok(Outcome {
        results: json!({
            "oracle_gate_counts": { "degree_2": degree2, "degree_4": degree4 },
            "grover_iterations": iters,
            "query_estimates": queries,
            "query_crossover_n": crossover,
            "reports": [report(Method::AdmmGasHard)?, report(Method::QdGasSoft)?],
        }),
        warnings,
        ..Outcome::default()
    })
}

pub fn compare(args: &CompareArgs) -> Result<Outcome, Failure> {
    check_repeats(args.repeats)?;
    let search = SearchArgs {
        mode: ModeArg::Hard,
        penalty: None,
        backend: args.backend,
    };
    let runs: Vec<Result<_, Failure>> = (0..args.repeats)
        .into_par_iter()
        .map(|i| {
            let mut warnings = Vec::new();
            let loaded = load(&args.instance, args.seed, i)?;
            let plan = plan_for(&loaded.inst, &search, &mut warnings)?;
            let obj = plan.objective.as_ref().ok_or("plan has no objective")?;
            let (x, best, marked) = brute_force_scaled(obj, plan.k).map_err(err)?;
            let seed = args.seed.wrapping_add(i as u64);
            let res = gas_minimize(&plan, &gas_config(&args.gas, seed)).map_err(err)?;
            let bound = 2.46 * (plan.search_space as f64 / marked as f64).sqrt();
            let row = json!({
                "repeat": i,
                "seed": seed,
                "instance": loaded.source,
                "brute_force_x": x.render(plan.n),
                "brute_force_value_scaled": best,
                "degeneracy": marked,
                "gas_x": res.best_x.render(plan.n),
                "gas_value_scaled": res.best_value,
                "agree": res.best_value == best,
                "oracle_queries": res.oracle_queries,
                "query_bound": bound,
                "budget_exhausted": res.budget_exhausted,
            });
            Ok((row, res.best_value == best, res.oracle_queries, bound, res.budget_exhausted, warnings))
        })
        .collect();

    let mut out = Outcome::default();
    let mut rows = Vec::new();
    let (mut agree, mut queries, mut bound) = (0usize, 0u64, 0.0f64);
    for (i, run) in runs.into_iter().enumerate() {
        let (row, ok, q, b, exhausted, warnings) = run?;
        out.warnings.extend(warnings.into_iter().map(|w| format!("repeat {i}: {w}")));
        if exhausted {
            out.budget_exhausted = true;
            out.warnings.push(format!("repeat {i}: query budget exhausted"));
        }
        agree += ok as usize;
        queries += q;
        bound += b;
        rows.push(row);
    }
    let count = args.repeats as f64;
    out.results = json!({
        "repeats": args.repeats,
        "agreement": agree,
        "agreement_rate": agree as f64 / count,
        "mean_oracle_queries": queries as f64 / count,
        "mean_query_bound": bound / count,
        "runs": rows,
    });
    Ok(out)
}
