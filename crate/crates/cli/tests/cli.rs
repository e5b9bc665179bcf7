use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qmarko_cli::io::read_record;

fn qmarko(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmarko"))
        .args(args)
        .current_dir(dir)
        .env_remove("QMARKO_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn generate_is_deterministic_and_rejects_empty_universe() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = qmarko(&["generate", "--n", "3", "--k", "1", "--seed", "7", "--out", name], dir.path());
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());

    let out = qmarko(&["generate", "--n", "0", "--k", "1"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let with_env = Command::new(env!("CARGO_BIN_EXE_qmarko"))
        .args(["generate", "--n", "3", "--k", "1", "--out", "env.json"])
        .current_dir(dir.path())
        .env("QMARKO_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&with_env), 0);
    qmarko(&["generate", "--n", "3", "--k", "1", "--seed", "7", "--out", "flag.json"], dir.path());
    assert_eq!(
        fs::read(dir.path().join("env.json")).unwrap(),
        fs::read(dir.path().join("flag.json")).unwrap()
    );
}

#[test]
fn solve_writes_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    qmarko(&["generate", "--n", "3", "--k", "1", "--seed", "4", "--out", "inst.json"], dir.path());
    let out = qmarko(&["solve", "--instance", "inst.json", "--method", "oracle", "--out", "run"], dir.path());
    assert_eq!(code(&out), 0);
    for file in ["instance.json", "config.json", "record.json", "trace.csv"] {
        assert!(dir.path().join("run").join(file).exists(), "{file}");
    }
    let record = read_record(&dir.path().join("run/record.json")).unwrap();
    let line = String::from_utf8_lossy(&out.stdout);
    let pick = record.portfolio.unwrap();
    assert!(line.contains(&pick.bitstring) && line.contains(&pick.value.to_string()));
}

#[test]
fn bad_inputs_and_infeasible_results_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("broken.json"), "{\"n\": 3").unwrap();
    let out = qmarko(&["solve", "--instance", "broken.json", "--method", "oracle"], dir.path());
    assert_eq!(code(&out), 2);
    let out = qmarko(&["solve", "--instance", "missing.json", "--method", "oracle"], dir.path());
    assert_eq!(code(&out), 2);
    let out = qmarko(&["report", "nowhere"], dir.path());
    assert_eq!(code(&out), 2);

    // Penalty QAOA's most probable portfolio is infeasible on this seed.
    qmarko(&["generate", "--n", "3", "--k", "1", "--seed", "2", "--out", "inst.json"], dir.path());
    let out = qmarko(
        &["solve", "--instance", "inst.json", "--method", "penalty-qaoa", "--seed", "2", "--out", "run"],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
    let record = read_record(&dir.path().join("run/record.json")).unwrap();
    assert!(!record.portfolio.unwrap().feasible);
}

#[test]
fn print_config_shows_precedence() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"p": 3, "max_iter": 50}"#).unwrap();
    let out = qmarko(
        &[
            "solve",
            "--instance",
            "x.json",
            "--method",
            "oracle",
            "--config",
            "cfg.json",
            "--p",
            "4",
            "--print-config",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let cfg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg["p"], 4);
    assert_eq!(cfg["max_iter"], 50);
    assert_eq!(cfg["shots"], 1000);
}

#[test]
fn sweep_report_covers_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmarko(
        &["sweep", "--n", "3", "--k", "1", "--seeds", "1,2,3", "--jobs", "3", "--out", "sw"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = qmarko(&["report", "sw"], dir.path());
    assert_eq!(code(&out), 0);

    let report = fs::read_to_string(dir.path().join("sw/report.md")).unwrap();
    let rows = report.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| Run")).count();
    assert_eq!(rows, 9);

    let hists: Vec<_> = fs::read_dir(dir.path().join("sw"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("hist_"))
        .collect();
    assert_eq!(hists.len(), 9);
    for path in hists {
        let mut reader = csv::Reader::from_path(&path).unwrap();
        let total: f64 = reader.records().map(|r| r.unwrap()[1].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9, "{}: {total}", path.display());
    }
}
