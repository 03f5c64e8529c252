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

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "cardgas", version, about = "Cardinality-constrained Grover adaptive search experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Prepare the Dicke state and check its amplitudes.
    DickeCheck(DickeArgs),
    /// Single Grover search at a fixed threshold.
    Grover(GroverArgs),
    /// Grover adaptive search.
    Gas(GasArgs),
    /// Hybrid ADMM on the risk-parity model.
    Admm(AdmmArgs),
    /// Gate-count and query-complexity estimates.
    Resources(ResourceArgs),
    /// Constrained search against brute force over repeated runs.
    Compare(CompareArgs),
}

/// `n=8 k=3 [seed=5]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthParam {
    pub key: String,
    pub value: u64,
}

impl FromStr for SynthParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (key, value) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
        if !matches!(key, "n" | "k" | "seed") {
            return Err(format!("unknown synthetic parameter `{key}`"));
        }
        let value = value.parse().map_err(|e| format!("{key}: {e}"))?;
        Ok(Self { key: key.to_string(), value })
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct InstanceArgs {
    /// Instance file (JSON with n, k, lambda, sigma, mu).
    #[arg(long, conflicts_with = "synth")]
    pub instance: Option<PathBuf>,
    /// Synthetic instance, e.g. `--synth n=8 k=3`; the seed defaults to `--seed`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub synth: Vec<SynthParam>,
    /// Covariance shrinkage towards a scaled identity, in [0, 1].
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Hard,
    Soft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendArg {
    Circuit,
    Phase,
    /// Circuit when the full register fits in the auto width, phase otherwise.
    Auto,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Hard)]
    pub mode: ModeArg,
    /// Cardinality penalty weight in scaled units (soft mode).
    #[arg(long)]
    pub penalty: Option<i64>,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GasOptions {
    #[arg(long, default_value_t = cardgas::grover::DEFAULT_XI)]
    pub xi: f64,
    /// Rotation ceiling per Grover run.
    #[arg(long)]
    pub r_cap: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_queries: u64,
    #[arg(long, default_value_t = cardgas::grover::DEFAULT_CAP_PATIENCE)]
    pub cap_patience: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Output {
    /// Directory for report.json and CSV traces.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DickeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GroverArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Threshold in scaled units; defaults to one above the optimum.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<i64>,
    /// Rotation count; defaults to the optimal count for the marked set.
    #[arg(long)]
    pub rotations: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub shots: usize,
    #[arg(long, required = true)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GasArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub gas: GasOptions,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, required = true)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverArg {
    BruteForce,
    GasHard,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct AdmmArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Return weight; overrides the instance file.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c4_margin: f64,
    #[arg(long, default_value_t = 1.5)]
    pub c5: f64,
    /// Overrides the selected zeta (beta follows as c5 zeta unless given).
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub t_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = SolverArg::BruteForce)]
    pub solver: SolverArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    #[command(flatten)]
    pub gas: GasOptions,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, required = true)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ResourceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Value-register width.
    #[arg(long)]
    pub m: usize,
    /// Number of optimal strings.
    #[arg(long, default_value_t = 1)]
    pub marked: u128,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Upper end of the crossover scan.
    #[arg(long, default_value_t = 400)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    #[command(flatten)]
    pub gas: GasOptions,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, required = true)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
