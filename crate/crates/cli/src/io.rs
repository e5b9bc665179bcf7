//! Run-directory layout and atomic file output.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qmarko::PortfolioInstance;
use serde::Serialize;

use crate::config::RunConfig;
use crate::run::{RunRecord, SolveMethod};

pub const INSTANCE_FILE: &str = "instance.json";
pub const CONFIG_FILE: &str = "config.json";
pub const RECORD_FILE: &str = "record.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const REPORT_FILE: &str = "report.md";

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file_name = path.file_name().context("output path has no file name")?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_instance(path: &Path) -> Result<PortfolioInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PortfolioInstance::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

pub fn read_record(path: &Path) -> Result<RunRecord> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn run_dir_name(method: SolveMethod, seed: u64) -> String {
    format!("{}-seed{}", method.name(), seed)
}

#[derive(Serialize)]
struct RunConfigFile<'a> {
    method: SolveMethod,
    #[serde(flatten)]
    config: &'a RunConfig,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trace_csv(record: &RunRecord) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "expectation", "beta_penalty", "feasible_fraction"])?;
    for (it, e, beta, frac) in record.trace_rows() {
        w.write_record([it.to_string(), e.to_string(), beta.to_string(), opt(frac)])?;
    }
    Ok(w.into_inner()?)
}

/// Writes `instance.json`, `config.json`, `record.json` and `trace.csv`.
pub fn write_run_dir(
    dir: &Path,
    instance: &PortfolioInstance,
    config: &RunConfig,
    record: &RunRecord,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_atomic(&dir.join(INSTANCE_FILE), format!("{}\n", instance.to_json()).as_bytes())?;
    write_json(&dir.join(CONFIG_FILE), &RunConfigFile { method: record.method, config })?;
    write_json(&dir.join(RECORD_FILE), record)?;
    write_atomic(&dir.join(TRACE_FILE), &trace_csv(record)?)?;
    Ok(dir.to_path_buf())
}
