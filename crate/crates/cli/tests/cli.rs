//! End-to-end runs of the `vvp` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vvp(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vvp"));
    cmd.args(args).env_remove("VVP_OUT");
    if let Some(dir) = out_env {
        cmd.env("VVP_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn invalid_arguments_exit_with_usage_code() {
    assert_eq!(vvp(&["convergence", "--scheme", "xx"], None).status.code(), Some(2));
    assert_eq!(vvp(&["convergence", "--problem", "nowhere"], None).status.code(), Some(2));
    assert_eq!(vvp(&["convergence", "--levels", "0"], None).status.code(), Some(2));
    assert_eq!(vvp(&["convergence", "--scheme", "cg", "--k", "2"], None).status.code(), Some(2));
    assert_eq!(vvp(&["convergence", "--problem", "lshape"], None).status.code(), Some(2));
    assert_eq!(vvp(&["check", "--config", "/nonexistent/settings"], None).status.code(), Some(2));
}

#[test]
fn convergence_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = vvp(&["convergence", "--levels", "3", "--out", out, "--no-timing"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("smooth_cg_convergence.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("level,dofs_total,h,"));
    let dofs: Vec<usize> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(dofs, vec![394, 1418, 5386]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("rates between consecutive levels"));
    assert_eq!(stderr(&o).lines().filter(|l| l.starts_with("level")).count(), 3);
}

#[test]
fn runs_without_timing_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = vvp(&["convergence", "--scheme", "dg", "--levels", "2", "--out", dir.path().to_str().unwrap(), "--no-timing"], None);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("smooth_dg_convergence.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = vvp(&["adaptive", "--problem", "lshape", "--max-dofs", "1500"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["lshape_cg_adaptive.csv", "lshape_cg_adaptive_indicators.csv", "lshape_cg_adaptive_mesh.txt"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let rows = fs::read_to_string(dir.path().join("lshape_cg_adaptive.csv")).unwrap();
    assert!(rows.lines().nth(1).unwrap().split(',').nth(3).unwrap() == "NaN");
}

#[test]
fn flags_override_the_settings_file() {
    let dir = tempfile::tempdir().unwrap();
    let from_file = dir.path().join("file");
    let from_flag = dir.path().join("flag");
    let settings = dir.path().join("settings");
    fs::write(&settings, format!("# study\nscheme = dg\nlevels = 2\nno-timing = true\nout = {}\n", from_file.display())).unwrap();
    let cfg = settings.to_str().unwrap();
    assert!(vvp(&["convergence", "--config", cfg], None).status.success());
    let text = fs::read_to_string(from_file.join("smooth_dg_convergence.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    let o = vvp(&["convergence", "--config", cfg, "--levels", "1", "--out", from_flag.to_str().unwrap()], None);
    assert!(o.status.success());
    let text = fs::read_to_string(from_flag.join("smooth_dg_convergence.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    fs::write(&settings, "colour = blue\n").unwrap();
    assert_eq!(vvp(&["check", "--config", cfg], None).status.code(), Some(2));
}

#[test]
fn check_reports_margins() {
    let o = vvp(&["check", "--problem", "layer"], None);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("reaction margin") && stdout.contains("dg assumptions hold"));
    let o = vvp(&["check"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn gradient_check_prints_both_mismatches() {
    let o = vvp(&["gradcheck", "--scheme", "dg"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let mismatch: f64 = stdout
        .lines()
        .find(|l| l.contains("discrete adjoint"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!(mismatch <= 1e-5, "{stdout}");
}
