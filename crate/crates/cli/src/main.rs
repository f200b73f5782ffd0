//! `haarlab`: command-line front end for Haar sampling experiments and
//! closed-form bound calculators.
//!
//! Every run prints a JSON report `{config, results, checks, timing}` and, with
//! `--output-dir`, writes it to `report.json` beside any CSV files. Exit status
//! is 0 when every check passes, 1 when a numerical check fails and 2 for
//! configuration errors.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use haarlab::born::SamplingRoute;
use haarlab::verify::Scale;
use haarlab::{GroupKind, RngStream};
use serde_json::json;

use commands::{execute, Check};
use config::{Command, ConfigError, ExperimentConfig, Params};

#[derive(Parser)]
#[command(name = "haarlab", version, about = "Haar-random sampling experiments and bound calculators")]
struct Cli {
    /// Directory for report.json and CSV outputs.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for all random streams (default 1).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone, Default)]
struct GroupArgs {
    /// so, su or sp.
    #[arg(long, value_parser = parse_group)]
    group: Option<GroupKind>,
    /// Group dimension D (quaternionic dimension for sp).
    #[arg(long)]
    dim: Option<usize>,
    /// Qubit count; D = 2^n (2^(n-1) for sp).
    #[arg(long)]
    qubits: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    /// Number of standard errors a Monte Carlo check allows.
    #[arg(long)]
    tolerance_se: Option<f64>,
}

impl GroupArgs {
    fn params(self) -> Params {
        Params {
            group: self.group,
            dim: self.dim,
            qubits: self.qubits,
            samples: self.samples,
            tolerance_se: self.tolerance_se,
            ..Params::default()
        }
    }
}

#[derive(Subcommand)]
enum Sub {
    /// Sample group elements (or states) and check their defining constraints.
    Sample {
        #[command(flatten)]
        g: GroupArgs,
        /// Sample states instead of group elements.
        #[arg(long)]
        states: bool,
    },
    /// Compare Gaussian-integration and direct Haar averages of random polynomials.
    Moment {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        polynomials: Option<usize>,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Compare Monte Carlo twirls with the commutant projection.
    TwirlCheck {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        inputs: Option<usize>,
    },
    /// Empirical tails of a basis-projector functional against the Levy bound.
    Concentration {
        #[command(flatten)]
        g: GroupArgs,
        /// Basis index of the projector.
        #[arg(long)]
        target: Option<usize>,
    },
    /// Expected TV distance between Born distributions and uniform.
    TvDistance {
        #[command(flatten)]
        g: GroupArgs,
        /// pushforward or elements.
        #[arg(long, value_parser = parse_route)]
        route: Option<SamplingRoute>,
    },
    /// Probability bounds for low strong state complexity.
    ComplexityBound {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        gate_set_size: Option<u64>,
        /// Design order; adds the approximate-design bound.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Use m = floor(k/3) in the design bound.
        #[arg(long)]
        integer_m: bool,
    },
    /// Near-orthogonal packing counts (--dim is the state dimension here).
    Packing {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Use epsilon = 2^-k D^(-k/2) and Delta = D^(-1/3).
        #[arg(long)]
        corollary: bool,
    },
    /// Statistical-query lower bound for learning Born distributions.
    SqBound {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_parser = parse_scale, default_value = "quick")]
        scale: Scale,
    },
    /// Run an experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_group(s: &str) -> Result<GroupKind, String> {
    s.parse().map_err(|e: haarlab::Error| e.to_string())
}

fn parse_route(s: &str) -> Result<SamplingRoute, String> {
    s.parse().map_err(|e: haarlab::Error| e.to_string())
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse().map_err(|e: haarlab::Error| e.to_string())
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl Sub {
    fn into_config(self, seed: Option<u64>, output_dir: Option<PathBuf>) -> Result<ExperimentConfig, ConfigError> {
        let (command, params) = match self {
            Sub::Sample { g, states } => (Command::Sample, Params { states: flag(states), ..g.params() }),
            Sub::Moment { g, k, polynomials, terms } => (Command::Moment, Params { k, polynomials, terms, ..g.params() }),
            Sub::TwirlCheck { g, k, inputs } => (Command::TwirlCheck, Params { k, inputs, ..g.params() }),
            Sub::Concentration { g, target } => (Command::Concentration, Params { target, ..g.params() }),
            Sub::TvDistance { g, route } => (Command::TvDistance, Params { route, ..g.params() }),
            Sub::ComplexityBound { g, r, delta, gate_set_size, k, epsilon, integer_m } => (
                Command::ComplexityBound,
                Params { r, delta, gate_set_size, k, epsilon, integer_m: flag(integer_m), ..g.params() },
            ),
            Sub::Packing { g, delta, k, epsilon, corollary } => {
                (Command::Packing, Params { delta, k, epsilon, corollary: flag(corollary), ..g.params() })
            }
            Sub::SqBound { g, tau, epsilon, beta } => (Command::SqBound, Params { tau, epsilon, beta, ..g.params() }),
            Sub::Verify { scale } => (Command::Verify, Params { scale: Some(scale), ..Params::default() }),
            Sub::Run { config } => {
                let mut c = ExperimentConfig::load(&config)?;
                if let Some(s) = seed {
                    c.seed = s;
                }
                if output_dir.is_some() {
                    c.output_dir = output_dir;
                }
                return Ok(c);
            }
        };
        Ok(ExperimentConfig::single(command, seed.unwrap_or(1), output_dir, params))
    }
}

/// Runs every grid point, each on its own stream keyed by (seed, point index).
fn run(config: &ExperimentConfig) -> Result<(serde_json::Value, bool), ConfigError> {
    let start = Instant::now();
    let points = config.points()?;
    let gridded = !config.grid.is_empty();
    let mut results = Vec::with_capacity(points.len());
    let mut checks: Vec<serde_json::Value> = Vec::new();
    let mut files = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let rng = RngStream::new(config.seed, i as u64);
        let outcome = execute(config.command, p, config.seed, &rng)?;
        let prefix = if gridded { format!("point{i}_") } else { String::new() };
        results.push(if gridded { json!({"point": i, "params": p, "result": outcome.result}) } else { outcome.result });
        checks.extend(outcome.checks.iter().map(|c: &Check| {
            let mut v = json!(c);
            if gridded {
                v["point"] = json!(i);
            }
            v
        }));
        files.extend(outcome.files.into_iter().map(|(name, bytes)| (format!("{prefix}{name}"), bytes)));
    }
    let passed = checks.iter().all(|c| c["passed"] == json!(true));
    let report = json!({
        "config": config,
        "results": results,
        "checks": {"all_passed": passed, "items": checks},
        "timing": {"wall_seconds": start.elapsed().as_secs_f64()},
    });
    if let Some(dir) = &config.output_dir {
        write_outputs(dir, &report, &files)?;
    }
    Ok((report, passed))
}

fn write_outputs(dir: &Path, report: &serde_json::Value, files: &[(String, Vec<u8>)]) -> Result<(), ConfigError> {
    let io = |e: std::io::Error| ConfigError(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(dir.join("report.json"), text).map_err(io)?;
    for (name, bytes) in files {
        std::fs::write(dir.join(name), bytes).map_err(io)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.command.into_config(cli.seed, cli.output_dir).and_then(|c| run(&c));
    match outcome {
        Ok((report, passed)) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
