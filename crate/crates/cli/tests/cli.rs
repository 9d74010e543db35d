//! End-to-end runs of the `scatter` binary: CSV layouts, determinism, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL_GRID: [&str; 8] = ["--kmax", "20", "--nk", "512", "--dx", "0.03125", "--xmax", "20"];

fn scatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scatter")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("scatter-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn scalar_smatrix_csv_is_deterministic() {
    let mut args = vec!["smatrix", "--scenario", "robin-step"];
    args.extend(SMALL_GRID);
    let a = scatter(&args);
    let b = scatter(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    assert!(text.starts_with("k,re_S,im_S\n"));
    assert_eq!(text.lines().count(), 513);
    assert_eq!(a.stdout, b.stdout);
    let ks: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn kernel_csv_layout() {
    let mut args = vec!["kernel", "--scenario", "robin-step", "--stride", "4"];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("x,y,re_11,im_11\n"));
}

#[test]
fn two_channel_field_csv_layout() {
    let d = workdir("field");
    let pot = write(&d, "pot.json", r#"{"n": 2, "cells": [{"a": 0.0, "b": 0.5, "matrix": [[1.0, 0.0], [0.2, 0.1], [0.2, -0.1], [0.5, 0.0]]}]}"#);
    let out = d.join("w.csv").display().to_string();
    let mut args = vec!["waveop", "--potential", &pot, "--form", "stationary", "--sign", "-", "--window", "5", "--out", &out];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("x,re_1,im_1,re_2,im_2\n"));
}

#[test]
fn line_smatrix_csv_layout() {
    let d = workdir("line");
    let lf = write(&d, "line.json", r#"{"n": 1, "potential": {"cells": []}, "interaction": {"delta": [[2.0, 0.0]]}}"#);
    let mut args = vec!["line", "smatrix", &lf];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("k,re_Tl,im_Tl,re_Tr,im_Tr,re_L,im_L,re_R,im_R\n"));
}

#[test]
fn builtin_verify_passes_and_writes_report() {
    let d = workdir("verify");
    let dir = d.join("out").display().to_string();
    let o = scatter(&["verify", "--scenario", "dirichlet-counterexample", "--out-dir", &dir]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(d.join("out/report.csv")).unwrap();
    assert!(report.starts_with("id,name,measured,threshold,pass\n"));
    assert!(std::fs::read_to_string(d.join("out/checks.csv")).unwrap().contains("growing"));
}

#[test]
fn failing_check_exits_with_one() {
    let d = workdir("fail");
    write(&d, "pot.json", r#"{"n": 1, "cells": [{"a": 0.0, "b": 1.0, "matrix": [[1.0, 0.0]]}]}"#);
    let cfg = write(&d, "cfg.json", r#"{"potential": "pot.json", "grid": {"kmax": 20.0, "nk": 512, "dx": 0.03125, "xmax": 20.0}, "tolerances": {"unitarity": 1e-300}}"#);
    let o = scatter(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains(",false"));
}

#[test]
fn malformed_config_exits_with_two_and_location() {
    let d = workdir("bad");
    let bc = write(&d, "bc.json", "{\n  \"n\": 1,\n  \"kind\": dirichlet\n}");
    let o = scatter(&["bc", &bc]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("bc.json:3:"), "{err}");
}

#[test]
fn invalid_grid_and_thread_settings_are_config_errors() {
    let o = scatter(&["smatrix", "--scenario", "neumann-free", "--dx", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_scatter")).env("SCATTER_THREADS", "zero").args(["bc", "x.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_summary_reports_thetas() {
    let d = workdir("bc");
    let bc = write(&d, "bc.json", r#"{"n": 2, "kind": "robin", "theta": [0.5, 3.141592653589793]}"#);
    let o = scatter(&["bc", &bc]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("\"dirichlet\": 1"), "{err}");
}

#[test]
fn positional_files_and_field_input_round_trip() {
    let d = workdir("input");
    let pot = write(&d, "pot.json", r#"{"n": 1, "cells": [{"a": 0.0, "b": 1.0, "matrix": [[1.0, 0.0]]}]}"#);
    let bc = write(&d, "bc.json", r#"{"n": 1, "kind": "robin", "theta": [1.0]}"#);
    let first = d.join("first.csv").display().to_string();
    let mut args = vec!["waveop", &pot, &bc, "--window", "5", "--out", &first];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let second = d.join("second.csv").display().to_string();
    let mut args = vec!["waveop", &pot, &bc, "--window", "5", "--adjoint", "--input", &first, "--out", &second];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&second).unwrap().lines().count();
    assert_eq!(rows, std::fs::read_to_string(&first).unwrap().lines().count());

    let bad = write(&d, "bad.csv", "x,re_1,im_1\n0.5,1,0\n");
    let mut args = vec!["waveop", &pot, &bc, "--window", "5", "--input", &bad];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.csv:2:"));
}

#[test]
fn probe_csv_layout() {
    let mut args = vec!["probe-lp", "--scenario", "neumann-free", "--window", "5", "--scales", "3"];
    args.extend(SMALL_GRID);
    let o = scatter(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("scale,ratio,window_sensitivity,classification\n"));
    assert_eq!(text.lines().count(), 4);
}
