use std::fs;
use std::process::Command;

use parl_core::bench::{read_csv, run_experiment, EvalRow, SummaryRow};

#[test]
fn base_stock_and_da_experiment_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.toml");
    fs::write(
        &spec,
        r#"
name = "heuristics"
env = "1s-3r"
methods = ["bs", "da"]

[eval]
runs = 3
episodes = 2
steps = 64
seed = 11

[tuning]
runs = 2
episodes = 1
steps = 64
seed = 12
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let summaries = run_experiment(&spec, &out).unwrap();
    assert_eq!(summaries.iter().map(|s| s.method.as_str()).collect::<Vec<_>>(), ["bs", "da"]);
    for f in ["network.cfg", "experiment.toml", "params_bs.jsonl", "grid_bs.csv", "params_da.jsonl", "summary.csv"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let bs: Vec<EvalRow> = read_csv(&out.join("eval_bs.csv")).unwrap();
    let da: Vec<EvalRow> = read_csv(&out.join("eval_da.csv")).unwrap();
    assert_eq!(bs.len(), 3);
    for (a, b) in bs.iter().zip(&da) {
        assert_eq!(a.env_seed, b.env_seed);
        assert_eq!(a.demand_total, b.demand_total);
    }
    assert_eq!(fs::read_to_string(out.join("params_da.jsonl")).unwrap().lines().count(), 3);
    let summary: Vec<SummaryRow> = read_csv(&out.join("summary.csv")).unwrap();
    assert_eq!(summary, summaries);
}

#[test]
fn parl_experiment_records_one_curve_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.toml");
    fs::write(
        &spec,
        r#"
env = "smoke"
methods = ["parl", "fixed"]
seeds = [3]

[eval]
runs = 2
episodes = 1
steps = 32
seed = 5

[parl]
iterations = 3
steps = 32
paths = 2
hidden = [4, 4]
epochs = 10

[fixed]
action = [5]
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    run_experiment(&spec, &out).unwrap();
    let curve = fs::read_to_string(out.join("learning_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 3);
    assert!(out.join("critic_seed3.txt").is_file());
    let parl: Vec<EvalRow> = read_csv(&out.join("eval_parl.csv")).unwrap();
    let fixed: Vec<EvalRow> = read_csv(&out.join("eval_fixed.csv")).unwrap();
    assert!(parl.iter().all(|r| r.train_seed == Some(3)));
    let traces = |rows: &[EvalRow]| rows.iter().map(|r| r.demand_total).collect::<Vec<_>>();
    assert_eq!(traces(&parl), traces(&fixed));
}

#[test]
fn unknown_spec_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.toml");
    fs::write(&spec, "env = \"smoke\"\nmethods = [\"da\"]\ncolour = 1\n").unwrap();
    assert!(run_experiment(&spec, &dir.path().join("out")).is_err());
}

#[test]
fn cli_prints_da_levels_and_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_parl-bench");
    let ok = Command::new(bin).args(["--env", "1s-2w-3r", "--out"]).arg(dir.path()).arg("da").output().unwrap();
    assert!(ok.status.success());
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 5);
    assert!(dir.path().join("params_da.jsonl").is_file());

    let bad = Command::new(bin).args(["--env", "nowhere", "--out"]).arg(dir.path()).arg("da").output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8(bad.stderr).unwrap().contains("error"));
}
