use std::path::Path;
use std::process::{Command, Output};

use semilin_core::mesh::{build_structured_mesh, write_mesh, Domain};

fn semilin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semilin"))
        .args(args)
        .env("SEMILIN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("missing {key} in:\n{text}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("study.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn mesh_info_on_single_square() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.mesh");
    write_mesh(&build_structured_mesh(Domain::UnitSquare, 1, 0.0).unwrap(), &path).unwrap();
    let out = semilin(&["mesh-info", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((field(&text, "min_angle") - 45.0).abs() < 1e-9);
    assert!((field(&text, "max_angle") - 90.0).abs() < 1e-9);
    assert_eq!(field(&text, "n_cells"), 2.0);
    assert_eq!(field(&text, "n_interior_dofs"), 0.0);
}

#[test]
fn mesh_info_rejects_missing_file() {
    let out = semilin(&["mesh-info", "/nonexistent/mesh.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_levels_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"levels": 0}"#);
    assert_eq!(semilin(&["run", &cfg]).status.code(), Some(2));
}

#[test]
fn malformed_and_unknown_input_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"levles": 3}"#);
    assert_eq!(semilin(&["run", &cfg]).status.code(), Some(2));
    assert_eq!(semilin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(semilin(&["run"]).status.code(), Some(2));
}

#[test]
fn bounds_in_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"dim": 3}"#);
    let out = semilin(&["bounds", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(field(&text, "constant_C") > 0.0);
    assert!(field(&text, "upper_bound") >= 1.0);
    assert!(field(&text, "lower_bound") <= -1.0);
}

#[test]
fn selftest_passes() {
    let out = semilin(&["selftest"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"levels": 2, "probe_samples": 4}"#);
    let csv = dir.path().join("out").join("conv.csv");
    let out = semilin(&["run", &cfg, "--output", csv.to_str().unwrap(), "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert!(lines[1].starts_with("level,"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn run_without_output_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"levels": 1, "probe_samples": 0}"#);
    let out = semilin(&["run", "--config", &cfg]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("level,"));
}
