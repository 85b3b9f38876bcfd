use std::path::PathBuf;

use matconc_cli::{CliError, Experiment, ExperimentConfig};
use proptest::prelude::*;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn shipped() -> Vec<(PathBuf, String)> {
    let mut v: Vec<(PathBuf, String)> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    v.sort();
    v
}

const MINIMAL: &str = r#"{
  "name": "mini",
  "kind": "verify-bernstein",
  "master_seed": 1,
  "trials": 200,
  "ensemble": {
    "kind": "sign-fixed",
    "matrices": { "kind": "random-symmetric", "n": 5, "dim": 3 }
  }
}"#;

fn config_error(text: &str) -> (String, String) {
    match ExperimentConfig::from_json(text) {
        Err(CliError::Config { path, message }) => (path, message),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn every_shipped_config_parses_and_round_trips() {
    let all = shipped();
    assert!(all.len() >= 9);
    for (path, text) in all {
        let cfg = ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
    }
}

#[test]
fn every_kind_has_a_shipped_config() {
    let kinds: std::collections::BTreeSet<&str> = shipped()
        .iter()
        .map(|(_, t)| ExperimentConfig::from_json(t).unwrap().kind())
        .collect();
    for k in [
        "verify-bernstein",
        "verify-fuk-nagaev",
        "verify-rosenthal",
        "verify-psd-rosenthal",
        "cov-scaling",
        "eig-scaling",
        "subsample",
        "audit",
        "fit-constants",
    ] {
        assert!(kinds.contains(k), "no config for {k}");
    }
}

#[test]
fn small_trial_count_names_trials() {
    let (path, message) = config_error(&MINIMAL.replace("\"trials\": 200", "\"trials\": 10"));
    assert_eq!(path, "trials");
    assert!(message.contains("100"), "{message}");
}

#[test]
fn missing_seed_is_rejected() {
    let (_, message) = config_error(&MINIMAL.replace("\"master_seed\": 1,", ""));
    assert!(message.contains("master_seed"), "{message}");
}

#[test]
fn unknown_kind_is_rejected() {
    let (_, message) = config_error(&MINIMAL.replace("verify-bernstein", "verify-everything"));
    assert!(message.contains("verify-everything"), "{message}");
}

#[test]
fn type_errors_carry_the_field_path() {
    let (path, _) = config_error(&MINIMAL.replace("\"n\": 5", "\"n\": \"five\""));
    assert!(path.contains("matrices") && path.ends_with('n'), "{path}");
    let (path, _) = config_error(&MINIMAL.replace("\"trials\": 200", "\"trials\": -3"));
    assert_eq!(path, "trials");
}

#[test]
fn unknown_fields_are_rejected() {
    let (_, message) = config_error(&MINIMAL.replace("\"trials\": 200,", "\"trials\": 200, \"tgrid\": [1],"));
    assert!(message.contains("tgrid"), "{message}");
}

#[test]
fn kind_specific_checks() {
    let unbounded = MINIMAL.replace(
        r#""kind": "sign-fixed","#,
        r#""kind": "scalar-heavy", "law": { "kind": "gaussian" },"#,
    );
    let (path, _) = config_error(&unbounded);
    assert_eq!(path, "ensemble.kind");
    let bad_grid = MINIMAL.replace("\"trials\": 200,", "\"trials\": 200, \"t_grid\": [2.0, 1.0],");
    assert_eq!(config_error(&bad_grid).0, "t_grid");
}

#[test]
fn defaults_are_filled() {
    let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
    match cfg.experiment {
        Experiment::VerifyBernstein {
            t_grid,
            grid_points,
            slack,
            ..
        } => {
            assert_eq!(t_grid, None);
            assert_eq!(grid_points, 40);
            assert_eq!(slack, 3.0);
        }
        other => panic!("wrong kind {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_configs_round_trip(
        seed in any::<u64>(),
        trials in 100usize..1_000_000,
        n in 1usize..500,
        dim in 1usize..60,
        points in 2usize..200,
        slack in 0.0f64..10.0,
        name in "[a-z][a-z0-9-]{0,20}",
    ) {
        let text = format!(
            r#"{{"name": "{name}", "kind": "verify-bernstein", "master_seed": {seed}, "trials": {trials},
               "ensemble": {{"kind": "sign-fixed", "matrices": {{"kind": "random-symmetric", "n": {n}, "dim": {dim}}}}},
               "grid_points": {points}, "slack": {slack:?}}}"#
        );
        let cfg = ExperimentConfig::from_json(&text).unwrap();
        prop_assert_eq!(&cfg, &ExperimentConfig::from_json(&cfg.to_json()).unwrap());
        prop_assert_eq!(cfg.master_seed, seed);
    }
}
