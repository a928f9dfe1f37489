//! Command-line driver: parse and normalize expressions, apply operators,
//! pull forms back through coordinate changes, and run verification suites.
//!
//! Exit codes: 0 on success, 1 when a suite finds a violated law, 2 for
//! usage errors (bad syntax, unknown suite, invalid parameters, unreadable
//! map files).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use bvforms::geometry::CoordinateChange;
use bvforms::operators;
use bvforms::parser;
use bvforms::suites::{run_suite, render_text, Suite, SuiteParams};

#[derive(Parser)]
#[command(name = "bvforms", version, about = "Exact form calculus on odd symplectic superspace")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an expression and print its canonical form.
    Parse {
        expr: String,
        /// Context dimension; inferred from the largest index when omitted.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Apply an operator to an expression and print the result.
    Apply {
        #[arg(long)]
        op: OpName,
        #[arg(long)]
        n: u32,
        expr: String,
    },
    /// Rewrite an expression through the coordinate change in a map file.
    Pullback {
        /// JSON file {"n": .., "xprime": [..], "pprime": [..]}.
        #[arg(long)]
        map: PathBuf,
        expr: String,
    },
    /// Run a named verification suite.
    Check {
        suite: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Degree cap for the enumerated sweeps.
        #[arg(long = "max-xdeg", default_value_t = 3)]
        max_xdeg: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    D,
    Omega,
    L,
    Delta,
    InvertOmega,
    Reduce,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Parse { expr, n } => {
            let n = match n {
                Some(n) if (1..=64).contains(&n) => n,
                Some(n) => return usage_error(format!("n = {n} out of range 1..=64")),
                None => match parser::max_generator_index(&expr) {
                    Ok(max) => max.max(1),
                    Err(e) => return usage_error(e),
                },
            };
            match parser::parse_hbar(&expr, n) {
                Ok(f) => {
                    println!("{f}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Cmd::Apply { op, n, expr } => {
            if n == 0 || n > 64 {
                return usage_error(format!("n = {n} out of range 1..=64"));
            }
            let f = match parser::parse_form(&expr, n) {
                Ok(f) => f,
                Err(e) => return usage_error(e),
            };
            let result = match op {
                OpName::D => Ok(operators::de_rham(&f)),
                OpName::Omega => Ok(operators::omega_wedge(&f)),
                OpName::L => Ok(operators::homotopy_l(&f)),
                OpName::Delta => operators::bv_delta(&f),
                OpName::InvertOmega => operators::invert_omega(&f),
                OpName::Reduce => operators::canonical_rep(&f),
            };
            match result {
                Ok(g) => {
                    println!("{g}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Cmd::Pullback { map, expr } => {
            let text = match std::fs::read_to_string(&map) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("cannot read {}: {e}", map.display())),
            };
            let value: serde_json::Value = match serde_json::from_str(&text) {
                Ok(v) => v,
                Err(e) => return usage_error(format!("{} is not JSON: {e}", map.display())),
            };
            let change = match CoordinateChange::from_json(&value) {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            match parser::parse_form(&expr, change.n()) {
                Ok(f) => {
                    println!("{}", change.pullback(&f));
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Cmd::Check { suite, n, max_xdeg, format, seed } => {
            let suite = match Suite::from_str(&suite) {
                Ok(s) => s,
                Err(e) => return usage_error(e),
            };
            let params = SuiteParams { n, max_deg: max_xdeg, seed };
            let report = match run_suite(suite, &params) {
                Ok(r) => r,
                Err(e) => return usage_error(e),
            };
            match format {
                Format::Text => print!("{}", render_text(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn main() -> ExitCode {
    run()
}
