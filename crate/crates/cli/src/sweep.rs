//! Method x seed sweeps with a CSV summary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use qmarko::{generate_instance, PortfolioInstance};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::io::{run_dir_name, write_atomic, write_run_dir, SUMMARY_FILE};
use crate::run::{apply_weights, solve, RunRecord, SolveMethod};

pub const SUMMARY_HEADER: [&str; 8] =
    ["method", "seed", "bitstring", "feasible", "value", "iterations", "wall_ms", "variance_bound_slack"];

/// Where each cell's instance comes from.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    /// One shared instance; only the run seed varies.
    Fixed(PortfolioInstance),
    /// A fresh `generate_instance(n, k, seed)` per seed.
    Generated { n: usize, k: usize },
}

impl InstanceSource {
    pub fn instance(&self, seed: u64) -> Result<PortfolioInstance> {
        match self {
            InstanceSource::Fixed(inst) => Ok(inst.clone()),
            InstanceSource::Generated { n, k } => Ok(generate_instance(*n, *k, seed)?),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub source: InstanceSource,
    pub methods: Vec<SolveMethod>,
    pub seeds: Vec<u64>,
    pub config: RunConfig,
    pub jobs: usize,
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct CellOutcome {
    pub method: SolveMethod,
    pub seed: u64,
    pub wall_ms: u128,
    pub result: Result<RunRecord>,
}

fn run_cell(spec: &SweepSpec, method: SolveMethod, seed: u64) -> CellOutcome {
    let start = Instant::now();
    let result = (|| {
        let mut instance = spec.source.instance(seed)?;
        let config = RunConfig { seed, ..spec.config.clone() };
        apply_weights(&mut instance, &config);
        let record = solve(&instance, method, &config)?;
        write_run_dir(&spec.out_dir.join(run_dir_name(method, seed)), &instance, &config, &record)?;
        Ok(record)
    })();
    let wall_ms = start.elapsed().as_millis();
    if let Err(e) = &result {
        let path = spec.out_dir.join(run_dir_name(method, seed)).join("error.txt");
        let _ = write_atomic(&path, format!("{e:#}\n").as_bytes());
    }
    CellOutcome { method, seed, wall_ms, result }
}

/// Runs every `(method, seed)` cell, seeds outermost, and writes
/// `summary.csv` in cell order regardless of how many jobs ran.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CellOutcome>> {
    anyhow::ensure!(!spec.seeds.is_empty(), "at least one seed is required");
    anyhow::ensure!(!spec.methods.is_empty(), "at least one method is required");
    std::fs::create_dir_all(&spec.out_dir).with_context(|| format!("creating {}", spec.out_dir.display()))?;

    let cells: Vec<(SolveMethod, u64)> =
        spec.seeds.iter().flat_map(|&s| spec.methods.iter().map(move |&m| (m, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(spec.jobs.max(1)).build()?;
    let outcomes: Vec<CellOutcome> =
        pool.install(|| cells.par_iter().map(|&(m, s)| run_cell(spec, m, s)).collect());

    write_atomic(&spec.out_dir.join(SUMMARY_FILE), &summary_csv(&outcomes)?)?;
    Ok(outcomes)
}

pub fn summary_csv(outcomes: &[CellOutcome]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for cell in outcomes {
        let mut row = vec![cell.method.name().to_string(), cell.seed.to_string()];
        match &cell.result {
            Ok(rec) => {
                match &rec.portfolio {
                    Some(p) => row.extend([p.bitstring.clone(), p.feasible.to_string(), p.value.to_string()]),
                    None => row.extend(["none".to_string(), "false".to_string(), String::new()]),
                }
                row.push(rec.iterations.to_string());
                row.push(cell.wall_ms.to_string());
                row.push(rec.variance_bound.map(|b| b.slack.to_string()).unwrap_or_default());
            }
            Err(_) => {
                row.extend(["error".to_string(), String::new(), String::new(), String::new()]);
                row.push(cell.wall_ms.to_string());
                row.push(String::new());
            }
        }
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

/// Summary rows as read back from disk, keyed by column name.
pub fn read_summary(dir: &Path) -> Result<Vec<csv::StringRecord>> {
    let path = dir.join(SUMMARY_FILE);
    let mut r = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(r.records().collect::<std::result::Result<_, _>>()?)
}
