//! Black-box behavior of the `ssci` binary: worked examples, exit-code
//! conventions, and input validation. Statistical accuracy at scale is
//! covered by the `acceptance` suite; these runs use small draw counts.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn ssci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssci"))
        .args(args)
        .output()
        .expect("failed to launch the CLI binary")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, got {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not valid JSON")
}

fn write_estimates(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn help_exits_zero_and_prints_usage() {
    let out = ssci(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"), "help text missing usage section");

    for sub in ["ci", "critval", "surface-fit", "simulate", "coverage-scan", "bootstrap"] {
        let out = ssci(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub} --help should exit 0");
    }
}

#[test]
fn unknown_flags_exit_two() {
    let out = ssci(&["critval", "--omega", "0.3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn critval_exact_at_zero_matches_the_one_sided_quantile() {
    let out = ssci(&[
        "critval", "--alpha", "0.05", "--omega", "0", "--exact", "--seed", "42", "--draws",
        "200000",
    ]);
    let v = stdout_json(&out);
    let c = v["c"].as_f64().unwrap();
    assert!(
        (c - 1.6448536269514722).abs() <= 0.01,
        "c(0) reported as {c}"
    );
    assert_eq!(v["method"], "exact_mc");
    assert!(v["std_error"].is_number());
}

#[test]
fn critval_surface_reports_both_arms_at_the_origin() {
    let out = ssci(&["critval", "--omega12", "0", "--omega13", "0"]);
    let v = stdout_json(&out);
    assert_eq!(v["method"], "surface");
    assert_eq!(v["c_lower"].as_f64().unwrap(), 1.954);
    assert_eq!(v["c_upper"].as_f64().unwrap(), 1.954);
}

#[test]
fn critval_rejects_an_inadmissible_triple_as_an_input_error() {
    // (0.5, 0.5, 0.5) sits exactly on the admissibility boundary.
    let out = ssci(&[
        "critval", "--alpha", "0.05", "--omega12", "0.5", "--omega13", "0.5", "--omega23", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty(), "input errors should explain themselves");
}

#[test]
fn exact_methods_require_a_seed() {
    let out = ssci(&["critval", "--omega", "0.3", "--exact"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ci_without_controls_is_the_standard_interval() {
    let dir = tempdir().unwrap();
    let est = write_estimates(
        dir.path(),
        "e.json",
        r#"{"b_hat": 2.0, "d_hat": [], "sigma_hat": [[4.0]], "n": 400}"#,
    );
    let out = ssci(&["ci", "--estimates", &est, "--side", "two-sided"]);
    let v = stdout_json(&out);
    assert_eq!(v["interval"]["kind"], "two_sided");
    // se = sqrt(4 / 400) = 0.1; no controls means the plain z-interval.
    let z = 1.959963984540054;
    let lower = v["interval"]["lower"].as_f64().unwrap();
    let upper = v["interval"]["upper"].as_f64().unwrap();
    assert!((lower - (2.0 - z * 0.1)).abs() < 1e-12);
    assert!((upper - (2.0 + z * 0.1)).abs() < 1e-12);
    assert_eq!(v["interval"]["degenerate"], false);
}

#[test]
fn ci_with_one_control_reports_subset_and_method() {
    let dir = tempdir().unwrap();
    let est = write_estimates(
        dir.path(),
        "e.json",
        r#"{"b_hat": 1.0, "d_hat": [0.5],
            "sigma_hat": [[1.0, 0.6], [0.6, 1.0]], "n": 100}"#,
    );
    let out = ssci(&["ci", "--estimates", &est, "--side", "upper"]);
    let v = stdout_json(&out);
    assert_eq!(v["interval"]["kind"], "one_sided");
    assert_eq!(v["interval"]["method"], "surface");
    assert_eq!(v["interval"]["used_subset"]["indices"], serde_json::json!([1]));
    // The standardized control estimate is 0.5 / 0.1 = 5, far above zero,
    // so the offset saturates at the truncation quantile: the bound sits
    // exactly at b_hat - z_{0.955} * se, the worst case the method allows.
    let bound = v["interval"]["bound"].as_f64().unwrap();
    assert!((bound - (1.0 - 1.6953977102721358 * 0.1)).abs() <= 1e-12);
}

#[test]
fn ci_estimates_must_be_well_formed() {
    let dir = tempdir().unwrap();
    // Covariance is not positive definite.
    let est = write_estimates(
        dir.path(),
        "bad.json",
        r#"{"b_hat": 1.0, "d_hat": [0.5],
            "sigma_hat": [[1.0, 2.0], [2.0, 1.0]], "n": 100}"#,
    );
    let out = ssci(&["ci", "--estimates", &est, "--side", "upper"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_csv_exits_two_without_partial_output() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "y,t1,t2\n1.0,0,1\n2.0,zebra,0\n").unwrap();
    let out_path = dir.path().join("study.csv");
    let out = ssci(&[
        "bootstrap", "--data", data.to_str().unwrap(), "--reps", "100", "--seed", "1", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists(), "no partial output on input errors");
}

#[test]
fn surface_fit_rejects_a_grid_too_coarse_to_identify_the_fit() {
    let dir = tempdir().unwrap();
    let out_path = dir.path().join("surf.txt");
    let out = ssci(&[
        "surface-fit", "--target", "c-one-sided", "--step", "0.2", "--seed", "5", "--draws",
        "50000", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}
