//! Comparison table and histogram files from finished runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::io::{
    read_instance, read_record, run_dir_name, write_atomic, INSTANCE_FILE, RECORD_FILE, REPORT_FILE,
};
use crate::run::{full_histogram, RunRecord, SolveMethod};
use crate::sweep::read_summary;

#[derive(Debug)]
pub struct MissingRecords(pub PathBuf);

impl std::fmt::Display for MissingRecords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "no run records found under {}", self.0.display())
    }
}

impl std::error::Error for MissingRecords {}

#[derive(Debug, Clone)]
pub struct ReportRun {
    pub name: String,
    pub dir: PathBuf,
    pub record: RunRecord,
    pub num_assets: usize,
}

fn load_run(name: String, dir: PathBuf) -> Result<ReportRun> {
    let record = read_record(&dir.join(RECORD_FILE))?;
    let num_assets = read_instance(&dir.join(INSTANCE_FILE))?.n;
    Ok(ReportRun { name, dir, record, num_assets })
}

/// Finds runs under `dir`: the directory itself if it holds a record,
/// otherwise the cells listed in `summary.csv`, otherwise every
/// subdirectory holding a record (sorted by name).
pub fn discover_runs(dir: &Path) -> Result<Vec<ReportRun>> {
    if dir.join(RECORD_FILE).is_file() {
        let name =
            dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "run".to_string());
        return Ok(vec![load_run(name, dir.to_path_buf())?]);
    }

    let mut runs = Vec::new();
    if let Ok(rows) = read_summary(dir) {
        for row in rows {
            let (Some(method), Some(seed)) =
                (row.get(0).and_then(SolveMethod::parse), row.get(1).and_then(|s| s.parse::<u64>().ok()))
            else {
                continue;
            };
            let name = run_dir_name(method, seed);
            let run_dir = dir.join(&name);
            if run_dir.join(RECORD_FILE).is_file() {
                runs.push(load_run(name, run_dir)?);
            }
        }
    } else if dir.is_dir() {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .with_context(|| format!("listing {}", dir.display()))?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().join(RECORD_FILE).is_file())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        for name in names {
            let run_dir = dir.join(&name);
            runs.push(load_run(name, run_dir)?);
        }
    }

    if runs.is_empty() {
        return Err(MissingRecords(dir.to_path_buf()).into());
    }
    Ok(runs)
}

pub fn comparison_table(runs: &[ReportRun]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| Run | Method | Seed | Optimal Portfolio | Is Feasible? | Value |");
    let _ = writeln!(out, "|---|---|---|---|---|---|");
    for run in runs {
        let r = &run.record;
        let (bits, feasible, value) = match &r.portfolio {
            Some(p) => {
                (format!("[{}]", spaced(&p.bitstring)), p.feasible.to_string(), format!("{:.6}", p.value))
            }
            None => ("none".to_string(), "false".to_string(), "-".to_string()),
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            run.name, r.method, r.seed, bits, feasible, value
        );
    }
    out
}

fn spaced(bits: &str) -> String {
    bits.chars().map(String::from).collect::<Vec<_>>().join(" ")
}

pub fn histogram_csv(run: &ReportRun) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bitstring", "probability"])?;
    for (bits, p) in full_histogram(&run.record, run.num_assets) {
        w.write_record([bits, p.to_string()])?;
    }
    Ok(w.into_inner()?)
}

pub struct ReportOutput {
    pub table: String,
    pub histogram_files: Vec<PathBuf>,
}

/// Writes `report.md` and one `hist_<run>.csv` per run into `dir`.
pub fn write_report(dir: &Path) -> Result<ReportOutput> {
    let runs = discover_runs(dir)?;
    let table = comparison_table(&runs);
    write_atomic(&dir.join(REPORT_FILE), table.as_bytes())?;
    let mut histogram_files = Vec::with_capacity(runs.len());
    for run in &runs {
        let path = dir.join(format!("hist_{}.csv", run.name));
        write_atomic(&path, &histogram_csv(run)?)?;
        histogram_files.push(path);
    }
    Ok(ReportOutput { table, histogram_files })
}
