// Copyright 2026 The Shy Coupling Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::fs;
use std::process::{Command, Output};

use shy::report::RunReport;

fn shy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_scenario_with_anchor() {
    let o = shy(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("ex44_annulus") && l.contains("Example 4.4")));
    assert!(text.lines().any(|l| l.starts_with("lemma34_star") && l.contains("Lemma 3.4")));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn bounds_subcommand() {
    let o = shy(&["bounds", "--lemma34", "0.3", "2", "1", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lower: f64 = text.lines().find_map(|l| l.strip_prefix("lower")).unwrap().trim().parse().unwrap();
    assert!((lower - 6.6738e-8).abs() < 1e-11);
    assert!(text.contains("upper     1e0"));
    let o = shy(&["bounds", "--gaussian", "1", "2"]);
    assert!(o.status.success());
    assert_eq!(shy(&["bounds", "--lemma34", "0.3", "2", "1", "2.5"]).status.code(), Some(2));
    assert_eq!(shy(&["bounds", "--lemma34", "-1", "2", "1", "3"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(shy(&["simulate", "--scenario", "nope"]).status.code(), Some(2));
    assert_eq!(shy(&["simulate", "--scenario", "ex42_free", "--dt", "0"]).status.code(), Some(2));
    assert_eq!(shy(&["simulate"]).status.code(), Some(2));
    assert_eq!(shy(&["frobnicate"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("run");
    let o = shy(&["simulate", "--scenario", "ex44_annulus", "--t", "0.01", "--paths", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "scenario = \"ex42_disc\"\nt = 0.5\npaths = 3\nseed = 11\ndt = 0.001\n").unwrap();
    let out = tmp.path().join("o");
    let o = shy(&["simulate", "--config", cfg.to_str().unwrap(), "--paths", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: RunReport = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.schema, 1);
    assert_eq!((report.config.paths, report.config.seed, report.config.t), (2, 11, 0.5));
    assert!(out.join("timing.json").exists());
    let csv = fs::read_to_string(out.join("path_0.csv")).unwrap();
    assert!(csv.starts_with("t,x1,x2,y1,y2,dist,lx,ly\n"));
    fs::write(&cfg, "scenario = \"ex42_disc\"\nbogus = 1\n").unwrap();
    assert_eq!(shy(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, workers: &str| {
        let out = tmp.path().join(dir);
        let o = shy(&[
            "simulate", "--scenario", "thm31_k4", "--t", "0.5", "--paths", "1", "--seed", "4", "--workers", workers,
            "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (fs::read(out.join("path_0.csv")).unwrap(), fs::read(out.join("report.json")).unwrap())
    };
    assert_eq!(run("a", "1"), run("b", "3"));
}

#[test]
fn report_to_stdout_without_out_dir() {
    let o = shy(&["simulate", "--scenario", "ex33_fig32", "--t", "0.01", "--paths", "2"]);
    assert!(o.status.success());
    let report: RunReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.anchor, "Example 3.3");
}
