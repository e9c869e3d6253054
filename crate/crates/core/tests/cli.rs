//! Exit codes and basic behavior of the `handsynth` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handsynth"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_flag_exits_with_usage_error() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--gesture", "grasp", "--out", "x", "--nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_input_is_a_runtime_error() {
    let out = run(&["evaluate", "/nonexistent/a.spec", "/nonexistent/b.spec"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn simulate_then_evaluate_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("g.spec");
    let png = dir.path().join("g.png");
    let out = run(&[
        "simulate",
        "--gesture",
        "slide",
        "--duration",
        "0.8",
        "--out",
        s(&spec),
        "--png",
        s(&png),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(spec.exists() && png.exists());

    let out = run(&["evaluate", s(&spec), s(&spec)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["mean_ssim_x100"].as_f64().unwrap() - 100.0).abs() < 1e-9);
    assert_eq!(v["mean_mse"].as_f64().unwrap(), 0.0);
}

#[test]
fn inspect_params_reports_radar_quantities() {
    let out = run(&["inspect-params"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let res = v["radar"]["frame_velocity_resolution_mps"]
        .as_f64()
        .unwrap();
    assert!((res - 0.039).abs() < 1e-3, "{res}");
}
