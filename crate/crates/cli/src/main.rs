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

//! `cardgas` command-line harness.
//!
//! Every command prints a JSON report `{config, seed, results, warnings}` to
//! stdout. With `--out-dir` the report and any CSV traces are also written
//! there. Exit codes: 0 success, 1 failed check, 2 invalid input,
//! 3 budget exhausted (the best incumbent is still reported).

mod args;
mod commands;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command};
use commands::{Failure, Outcome};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Grover(a) => Some(a.seed),
        Command::Gas(a) => Some(a.seed),
        Command::Admm(a) => Some(a.seed),
        Command::Compare(a) => Some(a.seed),
        Command::DickeCheck(_) | Command::Resources(_) => None,
    }
}

fn out_dir(cmd: &Command) -> Option<&Path> {
    let o = match cmd {
        Command::DickeCheck(a) => &a.output,
        Command::Grover(a) => &a.output,
        Command::Gas(a) => &a.output,
        Command::Admm(a) => &a.output,
        Command::Resources(a) => &a.output,
        Command::Compare(a) => &a.output,
    };
    o.out_dir.as_deref()
}

fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::DickeCheck(a) => commands::dicke_check(a),
        Command::Grover(a) => commands::grover(a),
        Command::Gas(a) => commands::gas(a),
        Command::Admm(a) => commands::admm(a),
        Command::Resources(a) => commands::resources(a),
        Command::Compare(a) => commands::compare(a),
    }
}

fn write_outputs(dir: &Path, report: &str, traces: &[(String, Vec<u8>)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report)?;
    for (name, bytes) in traces {
        fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = &cli.command;
    let outcome = match execute(cmd) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let mut config = serde_json::to_value(cmd).expect("arguments serialize");
    if !outcome.resolved.is_null() {
        config["resolved"] = outcome.resolved;
    }
    let report: Value = json!({
        "config": config,
        "seed": seed_of(cmd),
        "results": outcome.results,
        "warnings": outcome.warnings,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{text}");
    if let Some(dir) = out_dir(cmd) {
        if let Err(e) = write_outputs(dir, &text, &outcome.traces) {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(EXIT_INVALID);
        }
    }
    if outcome.check_failed {
        ExitCode::from(EXIT_CHECK_FAILED)
    } else if outcome.budget_exhausted {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    }
}
