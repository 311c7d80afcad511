mod common;

use common::{cli, cli_pipeline};

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn pipeline_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (fa, sa) = cli_pipeline(a.path());
    let (fb, sb) = cli_pipeline(b.path());
    assert_eq!(fa, fb);
    assert_eq!(sa, sb);
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for want in [
        "train.swd",
        "train.swr",
        "fixed.model.json",
        "stoch.history.csv",
        "stoch.sweep.csv",
        "front.csv",
        "front.manifest.csv",
        "fixed.train.toml",
    ] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
}

#[test]
fn default_sweep_has_ten_rows_and_single_point_grid_one() {
    let dir = tempfile::tempdir().unwrap();
    cli_pipeline(dir.path());
    let rows = |f: &str| {
        std::fs::read_to_string(dir.path().join(f))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("model_id"))
            .count()
    };
    assert_eq!(rows("fixed.sweep.csv"), 10);
    let out = cli(
        dir.path(),
        &["sweep", "--model", "fixed.model.json", "--data", "train.swr", "--grid", "1.0:1.0:1", "--id", "one"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(rows("one.sweep.csv"), 1);
}

#[test]
fn select_without_binding_cap_returns_global_best() {
    let dir = tempfile::tempdir().unwrap();
    let (_, chosen) = cli_pipeline(dir.path());
    let front = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
    let best = front
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .map(|f| f[2].parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    let got: f64 = chosen.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert_eq!(got, best);
    let out = cli(dir.path(), &["select", "--front", "front.csv", "--max-spikes", "0.5"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "INFEASIBLE");
}

#[test]
fn energy_command_prints_days() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["energy", "100", "3.7", "120e-6"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("128.5 days"));
}

#[test]
fn invalid_dist_is_a_usage_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    common::cli(dir.path(), &["synth", "--windows-per-class", "2", "--name", "d"]);
    common::cli(dir.path(), &["encode", "--input", "d.swd"]);
    let out = cli(dir.path(), &["train", "--data", "d.swr", "--dist", "uniform:2.0:1.0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("\"field\":\"dist.theta_min\""), "{err}");
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(dir.path(), &["encode", "--input", "nope.swd"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cli(dir.path(), &["pareto", "--sweeps", "nope.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(dir.path(), &["sweep", "--bogus"]).status.code(), Some(2));
    assert_eq!(cli(dir.path(), &["--help"]).status.code(), Some(0));
}
