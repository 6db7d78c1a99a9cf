//! Behavior of the `pilotopt` binary: output shape and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}"))
}

fn pilotopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn solve_se_prints_both_paths_by_default() {
    let out = pilotopt(&[
        "solve-se",
        scenario("table1.toml").to_str().unwrap(),
        "--power-dbm",
        "40",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("scheme=pos status=ok"));
    assert!(text.contains("scheme=aos status=ok"));
    assert!(text.contains("alpha_bs3="));
}

#[test]
fn solve_se_precise_flag_limits_output() {
    let out = pilotopt(&[
        "solve-se",
        scenario("table1.toml").to_str().unwrap(),
        "--power-dbm",
        "40",
        "--precise",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("scheme=pos"));
    assert!(!text.contains("scheme=aos"));
}

#[test]
fn solve_ee_reports_solution() {
    let out = pilotopt(&[
        "solve-ee",
        scenario("table1.toml").to_str().unwrap(),
        "--rate-mbps",
        "40",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("min_power_w="));
    assert!(text.contains("ee_bit_per_joule="));
}

#[test]
fn solve_ee_unreachable_rate_exits_infeasible() {
    let out = pilotopt(&[
        "solve-ee",
        scenario("table1.toml").to_str().unwrap(),
        "--rate-mbps",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let text = stdout(&out);
    assert!(text.contains("status=infeasible"));
    assert!(text.contains("achievable_rate_bps="));
}

#[test]
fn missing_scenario_is_a_config_error() {
    let out = pilotopt(&["solve-se", "/nonexistent.toml", "--power-dbm", "40"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "bandwidth_hz = 10e6\n").unwrap();
    let out = pilotopt(&["solve-se", path.to_str().unwrap(), "--power-dbm", "40"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scheme_is_a_usage_error() {
    let out = pilotopt(&[
        "power-sweep",
        scenario("table1.toml").to_str().unwrap(),
        "--schemes",
        "bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn power_sweep_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = pilotopt(&[
        "power-sweep",
        scenario("table1.toml").to_str().unwrap(),
        "--points",
        "5",
        "--schemes",
        "pos,ts",
        "--ts-alphas",
        "0.05",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("power_dbm,power_w,pos_rate_bps"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",ok")));
}

#[test]
fn power_sweep_emits_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let out = pilotopt(&[
        "power-sweep",
        scenario("table1.toml").to_str().unwrap(),
        "--points",
        "4",
        "--schemes",
        "pos",
        "--out",
        dir.path().join("sweep.csv").to_str().unwrap(),
        "--plot-dir",
        plots.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let data = std::fs::read_to_string(plots.join("power_sweep.dat")).unwrap();
    let manifest = std::fs::read_to_string(plots.join("power_sweep.columns")).unwrap();
    assert_eq!(data.lines().count(), 4);
    assert!(data.lines().all(|l| l.split(' ').count() == manifest.lines().count()));
    assert!(manifest.starts_with("1 power_dbm"));
}

#[test]
fn sweep_without_out_prints_csv_to_stdout() {
    let out = pilotopt(&[
        "alpha-sweep",
        scenario("table1.toml").to_str().unwrap(),
        "--points",
        "4",
        "--start",
        "0.01",
        "--stop",
        "0.2",
        "--power-dbm",
        "40",
        "--rate-mbps",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("alpha,se_bit_per_s_per_hz"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn rate_sweep_all_infeasible_exits_infeasible() {
    let out = pilotopt(&[
        "rate-sweep",
        scenario("table1.toml").to_str().unwrap(),
        "--start",
        "9",
        "--stop",
        "10",
        "--points",
        "3",
        "--schemes",
        "pos",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let text = stdout(&out);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",infeasible")));
}
