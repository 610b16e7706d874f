//! End-to-end tests of the `qicc` binary: exit codes, output formats, and
//! CSV determinism.

use std::path::Path;
use std::process::{Command, Output};

fn qicc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qicc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_zero_rate_reports_mse_min() {
    let out = qicc(&["solve", "--r-sum", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // standard setup: mse_min = 0.5
    assert!(text.contains("mse = 5.00000000000e-1"), "{text}");
    assert!(text.contains("n_sig = 0"), "{text}");
}

#[test]
fn solve_infeasible_rate_exits_2_with_r_max() {
    let out = qicc(&["solve", "--r-sum", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("R_max"), "{err}");
    assert!(err.contains("1.38682194791e0"), "{err}");
}

#[test]
fn malformed_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{broken");
    let out = qicc(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn missing_config_exits_1() {
    let out = qicc(&["solve", "--config", "/nonexistent/qicc.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_grid_two_hits_boundary_points() {
    let out = qicc(&["sweep", "--grid", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r_sum_bits,mse,iterations,status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,5.00000000000e-1"), "{}", lines[1]);
    assert!(lines[2].starts_with("1.38682194791e0,2.00000000000e0"), "{}", lines[2]);
}

#[test]
fn sweep_output_is_deterministic() {
    let a = stdout(&qicc(&["sweep", "--grid", "11"]));
    let b = stdout(&qicc(&["sweep", "--grid", "11"]));
    assert_eq!(a, b);
    // independent of the concurrency width
    let single = Command::new(env!("CARGO_BIN_EXE_qicc"))
        .args(["sweep", "--grid", "11"])
        .env("QICC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a, stdout(&single));
}

#[test]
fn sweep_warm_start_spans_same_grid() {
    let cold = stdout(&qicc(&["sweep", "--grid", "5"]));
    let warm = stdout(&qicc(&["sweep", "--grid", "5", "--warm-start"]));
    let first = |text: &str| -> Vec<String> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().to_owned())
            .collect()
    };
    assert_eq!(first(&cold), first(&warm));
}

#[test]
fn converge_half_max_trace() {
    let out = qicc(&["converge", "--r-sum", "half-max"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iter,mse,n_sig,aggregate_oac_power");
    assert!(lines.len() >= 2 && lines.len() < 1002, "{} lines", lines.len());
    // iter column counts up from 0
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("{i},")), "{line}");
    }
}

#[test]
fn converge_with_guard_is_monotone() {
    let out = qicc(&["converge", "--r-sum", "half-max", "--monotone-guard"]);
    assert_eq!(out.status.code(), Some(0));
    let mse: Vec<f64> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for w in mse.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn validate_passes_at_half_max() {
    let out = qicc(&["validate", "--r-sum", "half-max", "--samples", "200000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("result = PASS"), "{text}");
    assert!(text.contains("analytic_mse"), "{text}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = qicc(&["sweep", "--grid", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("r_sum_bits,mse,iterations,status\n"));
}

#[test]
fn solve_out_writes_solution_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solution.json");
    let out = qicc(&["solve", "--r-sum", "0.5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(record["scenario"]["k"], 2);
    assert!(record["mse"].as_f64().unwrap() > 0.5);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scenario": {"k": 4, "m": 2, "n0": 2.0, "pc": 5.0, "pt": 5.0}}"#,
    );
    let out = qicc(&["solve", "--config", &cfg, "--r-sum", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("K=4 M=2"));
}
