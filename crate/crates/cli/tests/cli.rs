//! End-to-end tests of the `lightpath` binary: every subcommand, the
//! override plumbing, and the error paths a user is most likely to hit.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../configs/{name}"))
}

fn lightpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightpath"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "expected success, got {:?}\nstderr: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of_failure(output: &Output) -> String {
    assert!(
        !output.status.success(),
        "expected failure, got success\nstdout: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn train_writes_the_artifacts_and_reports_both_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("paper_default.json");
    let out = dir.path().join("run");
    let output = lightpath(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("(21, 37)"), "{stdout}");
    assert!(stdout.contains("205.137677"), "{stdout}");
    assert!(stdout.contains("205.134831"), "{stdout}");
    assert!(stdout.contains("converged"), "{stdout}");
    for name in [
        "rounds.csv",
        "summary.json",
        "qtable.json",
        "paths.svg",
        "convergence.svg",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
}

#[test]
fn zero_episodes_reports_the_oracles_and_logs_no_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("paper_default.json");
    let output = lightpath(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "agent.episodes=0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("discrete oracle"), "{stdout}");
    assert!(stdout.contains("continuous oracle"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("rounds.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1, "header only: {csv}");
}

#[test]
fn oracle_prints_the_discrete_and_continuous_optima() {
    let config = config_path("paper_default.json");
    let output = lightpath(&["oracle", "--config", config.to_str().unwrap()]);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("(21, 37)"), "{stdout}");
    assert!(stdout.contains("rounds to discrete: (21, 37)"), "{stdout}");
    assert!(stdout.contains("snell residual"), "{stdout}");
}

#[test]
fn config_errors_name_the_offending_field_and_fail_the_run() {
    let config = config_path("paper_default.json");
    let output = lightpath(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "medium.indices=[1.0,-2.0,1.6]",
    ]);
    let stderr = stderr_of_failure(&output);
    assert!(stderr.contains("medium.indices"), "{stderr}");
}

#[test]
fn unknown_override_keys_are_rejected() {
    let config = config_path("paper_default.json");
    let output = lightpath(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "agent.learning_rate=0.5",
    ]);
    let stderr = stderr_of_failure(&output);
    assert!(stderr.contains("learning_rate"), "{stderr}");
}

#[test]
fn oversized_state_spaces_are_refused_not_attempted() {
    let config = config_path("paper_default.json");
    let output = lightpath(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "medium.indices=[1.0,1.1,1.2,1.3,1.4,1.5,1.6,1.7]",
        "--set",
        "medium.end=[400,50]",
        "--set",
        "s_ini=[0,0,0,0,0,0,0]",
    ]);
    let stderr = stderr_of_failure(&output);
    assert!(stderr.contains("exhaustive-scan cap"), "{stderr}");
}

#[test]
fn sweep_trains_each_seed_once_and_aggregates_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("paper_alt.json");
    let output = lightpath(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--seeds",
        "2,7,2",
        "--jobs",
        "2",
    ]);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("convergence rate"), "{stdout}");
    for seed in [2u64, 7] {
        assert!(dir.path().join(format!("seed-{seed}/rounds.csv")).is_file());
    }
    let aggregate: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(aggregate["total"], 2, "duplicate seed trains once");
    assert_eq!(aggregate["results"][0]["seed"], 2);
    assert_eq!(aggregate["results"][1]["seed"], 7);
    assert!(aggregate["oracle_time"].as_f64().unwrap() > 0.0);
}

#[test]
fn a_sweep_seed_matches_a_train_run_with_that_seed_byte_for_byte() {
    let sweep_dir = tempfile::tempdir().unwrap();
    let train_dir = tempfile::tempdir().unwrap();
    let config = config_path("paper_alt.json");
    let output = lightpath(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        sweep_dir.path().to_str().unwrap(),
        "--seeds",
        "5",
    ]);
    stdout_of(&output);
    let output = lightpath(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--set",
        "agent.seed=5",
        "--out",
        train_dir.path().to_str().unwrap(),
    ]);
    stdout_of(&output);
    // summary.json echoes the config (whose output directory differs); the
    // data artifacts must be identical.
    for name in ["rounds.csv", "qtable.json", "paths.svg", "convergence.svg"] {
        let from_sweep = std::fs::read(sweep_dir.path().join("seed-5").join(name)).unwrap();
        let from_train = std::fs::read(train_dir.path().join(name)).unwrap();
        assert_eq!(from_sweep, from_train, "{name} differs between runs");
    }
}

#[test]
fn sweep_requires_at_least_one_seed() {
    let config = config_path("paper_alt.json");
    let missing = lightpath(&["sweep", "--config", config.to_str().unwrap()]);
    let stderr = stderr_of_failure(&missing);
    assert!(stderr.contains("--seeds"), "{stderr}");
}

#[test]
fn render_rebuilds_the_figures_from_the_round_log() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("paper_default.json");
    let out = dir.path().to_str().unwrap().to_owned();
    stdout_of(&lightpath(&[
        "train",
        "--config",
        config.to_str().unwrap(),
        "--out",
        &out,
    ]));
    let paths_before = std::fs::read(dir.path().join("paths.svg")).unwrap();
    let conv_before = std::fs::read(dir.path().join("convergence.svg")).unwrap();
    std::fs::remove_file(dir.path().join("paths.svg")).unwrap();
    std::fs::remove_file(dir.path().join("convergence.svg")).unwrap();
    stdout_of(&lightpath(&[
        "render",
        "--config",
        config.to_str().unwrap(),
        "--out",
        &out,
    ]));
    assert_eq!(
        std::fs::read(dir.path().join("paths.svg")).unwrap(),
        paths_before
    );
    assert_eq!(
        std::fs::read(dir.path().join("convergence.svg")).unwrap(),
        conv_before
    );
}
