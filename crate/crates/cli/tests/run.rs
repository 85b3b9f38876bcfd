use std::path::PathBuf;
use std::process::Command;

use matconc_cli::{emit_report, run_experiment, CliError, ExperimentConfig, Format, Report, Table, TAIL_COLUMNS};

fn small_bernstein(trials: usize) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"name": "small", "kind": "verify-bernstein", "master_seed": 5, "trials": {trials},
            "ensemble": {{"kind": "sign-fixed", "matrices": {{"kind": "random-symmetric", "n": 20, "dim": 6}}}},
            "grid_points": 12}}"#
    ))
    .unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn bernstein_report_has_tail_table_and_verdict() {
    let report = run_experiment(&small_bernstein(2000)).unwrap();
    let tail = report.table("tail").unwrap();
    assert_eq!(tail.columns, TAIL_COLUMNS);
    assert_eq!(tail.rows.len(), 12);
    let v = report.verdict("bernstein-dominates").unwrap();
    assert!(v.passed, "{}", v.detail);
    assert!(report.passed);
    assert!(report.fitted_k.contains_key("bernstein"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = small_bernstein(1000);
    let one = in_pool(1, || run_experiment(&cfg).unwrap());
    let four = in_pool(4, || run_experiment(&cfg).unwrap());
    assert_eq!(one.tables, four.tables);
    assert_eq!(one.fitted_k, four.fitted_k);
    assert_eq!(one.verdicts, four.verdicts);
}

#[test]
fn rerun_gives_byte_identical_csv() {
    let cfg = small_bernstein(500);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut bodies = Vec::new();
    for d in &dirs {
        let report = run_experiment(&cfg).unwrap();
        emit_report(&report, &[Format::Csv], d.path()).unwrap();
        bodies.push(std::fs::read(d.path().join("tail.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn emitted_files_follow_the_schema() {
    let report = run_experiment(&small_bernstein(500)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&report, &[Format::Csv, Format::Json], dir.path()).unwrap();
    assert_eq!(written.len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("tail.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,empirical,stderr,bound_raw,bound_clamped"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert!(json["fitted_K"]["bernstein"].is_number());
    assert_eq!(json["config"]["master_seed"], 5);
    for v in json["verdicts"].as_array().unwrap() {
        let table = v["table"].as_str().unwrap();
        assert!(json["tables"].as_array().unwrap().iter().any(|t| t["name"] == table));
    }
}

#[test]
fn empty_report_is_rejected() {
    let report = Report::new(&small_bernstein(500));
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        emit_report(&report, &[Format::Csv, Format::Json], dir.path()),
        Err(CliError::EmptyReport(_))
    ));
    let mut no_verdicts = Report::new(&small_bernstein(500));
    let mut t = Table::new("x", &["a"]);
    t.push_values(&[1.0]);
    no_verdicts.add_table(t);
    assert!(matches!(
        emit_report(&no_verdicts, &[Format::Json], dir.path()),
        Err(CliError::EmptyReport("verdicts"))
    ));
}

#[test]
fn unwritable_output_is_an_error() {
    let report = run_experiment(&small_bernstein(500)).unwrap();
    let file = tempfile::NamedTempFile::new().unwrap();
    let err = emit_report(&report, &[Format::Csv], &file.path().join("sub")).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
}

#[test]
fn missing_cells_are_empty_in_csv() {
    let mut t = Table::new("t", &["a", "b"]);
    t.push(vec![Some(1.5), None]);
    t.push(vec![Some(f64::INFINITY), Some(0.1)]);
    assert_eq!(t.to_csv(), "a,b\n1.5,\ninf,0.1\n");
}

#[test]
fn every_kind_runs_on_a_small_budget() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let mut cfg = ExperimentConfig::from_path(&path).unwrap();
        cfg.trials = match cfg.kind() {
            "fit-constants" | "cov-scaling" | "eig-scaling" => 100,
            _ => 400,
        };
        let report = run_experiment(&cfg).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!report.verdicts.is_empty(), "{}", path.display());
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_matconc"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.json");
    std::fs::write(&cfg_path, small_bernstein(300).to_json()).unwrap();
    let out = dir.path().join("out");
    let status = binary()
        .args(["run", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "2"])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out.join("summary.json").exists() && out.join("tail.csv").exists());

    let bad = binary()
        .args(["run", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--trials-override", "10"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("trials"));

    // a tiny explicit grid below the data forces a violation
    let mut failing = small_bernstein(300);
    if let matconc_cli::Experiment::VerifyBernstein { ensemble, .. } = &failing.experiment {
        failing.experiment = matconc_cli::Experiment::VerifyBernstein {
            ensemble: ensemble.clone(),
            t_grid: Some(vec![0.01, 0.02]),
            grid_points: 2,
            slack: 0.0,
        };
    }
    let fail_path = dir.path().join("fail.json");
    std::fs::write(&fail_path, failing.to_json()).unwrap();
    let res = binary()
        .args(["run", fail_path.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1), "{}", String::from_utf8_lossy(&res.stdout));
}
