//! Argument parsing and command dispatch.

use std::path::PathBuf;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use qmarko::instance::InstanceParseError;
use qmarko::{generate_instance, PortfolioInstance};

use crate::config::{ConfigFlags, SEED_ENV};
use crate::io::{read_instance, write_atomic, write_run_dir};
use crate::report::{write_report, MissingRecords};
use crate::run::{apply_weights, solve, SolveMethod};
use crate::sweep::{run_sweep, InstanceSource, SweepSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_NO_FEASIBLE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qmarko", version, about = "Slack-ancilla QAOA for constrained Markowitz portfolios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a portfolio instance and write it as JSON.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Instance seed (falls back to $QMARKO_SEED, then 0).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "instance.json")]
        out: PathBuf,
    },
    /// Check an instance file against the generator invariants.
    Validate { instance: PathBuf },
    /// Run one method on one instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: SolveMethod,
        #[command(flatten)]
        flags: ConfigFlags,
        /// Run directory to write.
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Run every method for every seed.
    Sweep {
        /// Shared instance; without it each seed generates a fresh one.
        #[arg(long, conflicts_with_all = ["n", "k"])]
        instance: Option<PathBuf>,
        #[arg(long, requires = "k")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "slack-qaoa,penalty-qaoa,oracle")]
        methods: Vec<SolveMethod>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[command(flatten)]
        flags: ConfigFlags,
        /// Concurrent cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Build the comparison table and histogram CSVs for a run or sweep directory.
    Report { dir: PathBuf },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_INVALID_INPUT, error: error.into() }
    }

    fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_RUNTIME, error: error.into() }
    }
}

fn env_seed() -> Option<String> {
    std::env::var(SEED_ENV).ok()
}

fn load_instance(path: &std::path::Path) -> Result<PortfolioInstance, Failure> {
    read_instance(path).map_err(Failure::input)
}

/// Runs a parsed command, printing to stdout; returns the exit code.
pub fn execute(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Generate { n, k, seed, out } => {
            if n == 0 {
                return Err(Failure::input(anyhow!("--n must be at least 1")));
            }
            if k == 0 || k > n {
                return Err(Failure::input(anyhow!("--k must lie in [1, --n] (got --k {k}, --n {n})")));
            }
            let seed = match seed {
                Some(s) => s,
                None => match env_seed() {
                    Some(raw) => raw.trim().parse().map_err(|_| {
                        Failure::input(anyhow!("{SEED_ENV}={raw:?} is not an unsigned integer"))
                    })?,
                    None => 0,
                },
            };
            let inst = generate_instance(n, k, seed).map_err(Failure::input)?;
            write_atomic(&out, format!("{}\n", inst.to_json()).as_bytes()).map_err(Failure::runtime)?;
            let active: Vec<usize> = (0..n).filter(|&i| inst.alpha[i] == 1.0).collect();
            println!("wrote {}: n={n} k={k} seed={seed} active assets {active:?}", out.display());
            Ok(EXIT_OK)
        }
        Command::Validate { instance } => {
            let text = std::fs::read_to_string(&instance).map_err(Failure::input)?;
            let inst =
                PortfolioInstance::from_json(&text).map_err(|e: InstanceParseError| Failure::input(e))?;
            let report = inst.validate();
            for c in &report.checks {
                println!("{:<16} {}  {}", c.name, if c.passed { "ok  " } else { "FAIL" }, c.detail);
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_INVALID_INPUT })
        }
        Command::Solve { instance, method, flags, out } => {
            let cfg = flags.resolve(env_seed()).map_err(Failure::input)?;
            if flags.print_config {
                println!("{}", serde_json::to_string_pretty(&cfg).map_err(Failure::runtime)?);
                return Ok(EXIT_OK);
            }
            let mut inst = load_instance(&instance)?;
            apply_weights(&mut inst, &cfg);
            let record = solve(&inst, method, &cfg).map_err(Failure::input)?;
            write_run_dir(&out, &inst, &cfg, &record).map_err(Failure::runtime)?;
            match &record.portfolio {
                Some(p) => println!(
                    "{:<24} {:<12} {:<8} {}",
                    method.name(),
                    format!("[{}]", p.bitstring),
                    p.feasible,
                    p.value
                ),
                None => println!("{:<24} {:<12} {:<8} -", method.name(), "none", false),
            }
            Ok(if record.found_feasible() { EXIT_OK } else { EXIT_NO_FEASIBLE })
        }
        Command::Sweep { instance, n, k, methods, seeds, flags, jobs, out } => {
            let cfg = flags.resolve(env_seed()).map_err(Failure::input)?;
            if flags.print_config {
                println!("{}", serde_json::to_string_pretty(&cfg).map_err(Failure::runtime)?);
                return Ok(EXIT_OK);
            }
            let source = match (instance, n, k) {
                (Some(path), _, _) => InstanceSource::Fixed(load_instance(&path)?),
                (None, Some(n), Some(k)) => {
                    if n == 0 || k == 0 || k > n {
                        return Err(Failure::input(anyhow!("--n/--k must satisfy 1 <= --k <= --n")));
                    }
                    InstanceSource::Generated { n, k }
                }
                _ => return Err(Failure::input(anyhow!("give either --instance or both --n and --k"))),
            };
            let spec = SweepSpec { source, methods, seeds, config: cfg, jobs, out_dir: out.clone() };
            let outcomes = run_sweep(&spec).map_err(Failure::runtime)?;
            let failed = outcomes.iter().filter(|c| c.result.is_err()).count();
            for c in &outcomes {
                if let Err(e) = &c.result {
                    eprintln!("cell {} seed {} failed: {e:#}", c.method, c.seed);
                }
            }
            println!(
                "{} cells ({} failed); summary at {}",
                outcomes.len(),
                failed,
                out.join(crate::io::SUMMARY_FILE).display()
            );
            Ok(EXIT_OK)
        }
        Command::Report { dir } => {
            let output = write_report(&dir).map_err(|e| {
                if e.is::<MissingRecords>() {
                    Failure::input(e)
                } else {
                    Failure::runtime(e)
                }
            })?;
            print!("{}", output.table);
            println!("{} histogram files written", output.histogram_files.len());
            Ok(EXIT_OK)
        }
    }
}
