//! End-to-end tests of the `nonloc-mt` binary: output formats, known
//! values, exit codes, config-file precedence, and artifact round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nonloc-mt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json_value(out: &Output) -> f64 {
    let v: serde_json::Value = serde_json::from_str(&stdout(out)).expect("valid JSON");
    v["value"].as_f64().expect("numeric value")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nonloc-mt-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn compute_sphere_constant_matches_pi() {
    let out = run(&["compute", "--functional", "kdp", "--d", "2", "--p", "2"]);
    assert!(out.status.success());
    assert!((json_value(&out) - std::f64::consts::PI).abs() < 1e-8);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["stderr"].as_f64().unwrap(), 0.0);
}

#[test]
fn compute_linear_level_functional_matches_closed_form() {
    // slope-1 field on (0, 1) at level delta: value (1 - delta)^2
    let out = run(&[
        "compute", "--functional", "idelta", "--field", "linear", "--domain", "0,1", "--p",
        "2", "--delta", "0.1",
    ]);
    assert!(out.status.success());
    assert!((json_value(&out) - 0.81).abs() < 1e-6);
}

#[test]
fn compute_indicator_at_its_own_height_is_null() {
    // jump of exactly delta never exceeds the strict level threshold
    let out = run(&["compute", "--functional", "idelta", "--field", "indicator:height=delta"]);
    assert!(out.status.success());
    assert_eq!(json_value(&out), 0.0);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp_dir("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "functional = kdp\nd = 2\np = 2\n# comment\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = run(&["compute", "--config", cfg]);
    assert!(from_file.status.success());
    assert!((json_value(&from_file) - std::f64::consts::PI).abs() < 1e-8);

    // flag beats file: p = 1 gives the d = 2 constant 4
    let overridden = run(&["compute", "--config", cfg, "--p", "1"]);
    assert!(overridden.status.success());
    assert!((json_value(&overridden) - 4.0).abs() < 1e-8);
}

#[test]
fn verify_writes_reports_and_exits_zero_on_holds() {
    let dir = tmp_dir("verify");
    let out = run(&["verify", "loglog", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("status:    holds"));
    let json = std::fs::read_to_string(dir.join("loglog.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["statement_id"], "loglog");
    assert_eq!(v["status"], "holds");
    assert!(dir.join("loglog.txt").exists());

    // report re-renders the stored JSON and preserves the exit code
    let rerender = run(&["report", "--input", dir.join("loglog.json").to_str().unwrap()]);
    assert_eq!(rerender.status.code(), Some(0));
    assert!(stdout(&rerender).contains("status:    holds"));
}

#[test]
fn sweep_csv_and_svg_round_trip_byte_identical() {
    let dir = tmp_dir("sweep");
    let out = run(&[
        "sweep", "--functional", "idelta", "--field", "linear", "--domain", "0,1", "--p",
        "2", "--param", "delta", "--values", "0.1,0.2,0.4", "--logy", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("param,value,stderr,method\n"));
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(stdout(&out), csv);
    // the closed-form column: value = (1 - delta)^2
    for (line, delta) in csv.lines().skip(1).zip([0.1f64, 0.2, 0.4]) {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((value - (1.0 - delta).powi(2)).abs() < 1e-6);
    }

    let svg = std::fs::read(dir.join("sweep.svg")).unwrap();
    assert!(svg.starts_with(b"<svg"));

    let replot_dir = tmp_dir("replot");
    let rerun = run(&[
        "report", "--input", dir.join("sweep.csv").to_str().unwrap(), "--logy", "--out",
        replot_dir.to_str().unwrap(),
    ]);
    assert!(rerun.status.success());
    let replotted = std::fs::read(replot_dir.join("sweep.svg")).unwrap();
    assert_eq!(svg, replotted, "re-plotting a sweep CSV must be byte-identical");
}

#[test]
fn exit_codes_for_bad_config_and_high_variance() {
    // unknown verifier id
    assert_eq!(run(&["verify", "nosuch"]).status.code(), Some(2));
    // unknown field spec
    let bad_field = run(&["compute", "--functional", "idelta", "--field", "mystery"]);
    assert_eq!(bad_field.status.code(), Some(2));
    // interval domain in d = 2
    let bad_dim = run(&["compute", "--functional", "idelta", "--domain", "0,1", "--d", "2"]);
    assert_eq!(bad_dim.status.code(), Some(2));
    // noisy Monte Carlo run under a tiny sample budget (deterministic seed)
    let noisy = run(&[
        "compute", "--functional", "bbm", "--field", "indicator:height=1", "--domain",
        "0,1", "--p", "2", "--samples", "8192", "--seed", "7",
    ]);
    assert_eq!(noisy.status.code(), Some(3));
}

#[test]
fn thread_cap_env_is_validated() {
    let ok = bin()
        .args(["compute", "--functional", "kdp", "--d", "2", "--p", "2"])
        .env("NONLOC_MT_THREADS", "1")
        .output()
        .unwrap();
    assert!(ok.status.success());
    let bad = bin()
        .args(["compute", "--functional", "kdp", "--d", "2", "--p", "2"])
        .env("NONLOC_MT_THREADS", "zero point five")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn identical_seed_and_config_reproduce_monte_carlo_output() {
    let args = [
        "compute", "--functional", "bbm", "--field", "linear", "--domain", "0,1", "--p",
        "2", "--samples", "65536", "--seed", "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    // slope-1 field in 1-D: every difference quotient is exactly 1, so the
    // value approaches the d = 1 sphere constant 2 (minus a small boundary
    // loss from pairs leaving the interval)
    assert!((json_value(&a) - 2.0).abs() < 0.1, "value {}", json_value(&a));
}

#[test]
fn report_rejects_unknown_artifacts() {
    let dir = tmp_dir("badreport");
    let path = dir.join("data.txt");
    std::fs::write(&path, "hello").unwrap();
    assert_eq!(run(&["report", "--input", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(
        run(&["report", "--input", dir.join("missing.csv").to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}
