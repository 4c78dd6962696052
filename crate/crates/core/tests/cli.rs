//! End-to-end tests of the `limitqre` binary.

use std::path::Path;
use std::process::{Command, Output};

fn limitqre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_limitqre"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = limitqre(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn solve_writes_result_and_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    stdout(&["solve", "four-action", "--theta", "0.5", "--out", out.to_str().unwrap()]);

    let result: serde_json::Value = serde_json::from_str(&read(&out.join("result.json"))).unwrap();
    assert_eq!(result["termination"], "nonconvergence");
    assert!((result["beta_star"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((result["nu"].as_f64().unwrap() - 0.01).abs() < 1e-15);

    let csv = read(&out.join("p_star.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("player,label,probability"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    let total: f64 = rows
        .iter()
        .filter(|r| r[0] == "1")
        .map(|r| r[2].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-8);
    assert!(!out.join("p_star_targets.csv").exists());
}

#[test]
fn trembles_add_the_target_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    stdout(&[
        "solve",
        "money-request",
        "--tremble-q",
        "0.2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(read(&out.join("p_star_targets.csv")).starts_with("player,label,probability\n"));
    assert_ne!(read(&out.join("p_star_targets.csv")), read(&out.join("p_star.csv")));
}

#[test]
fn unbounded_paths_report_the_cap() {
    let r = json(&["solve", "four-action", "--theta", "0.49", "--format", "json"]);
    assert_eq!(r["termination"], "beta_cap_reached");
    assert_eq!(r["beta_star"], "unbounded");
}

#[test]
fn sweep_rows_match_single_solves() {
    let sweep = stdout(&["sweep", "four-action", "--param", "theta", "--values", "0.5,0.9"]);
    let mut lines = sweep.lines();
    assert_eq!(
        lines.next(),
        Some("param,value,beta_star,termination,mean_stat,mode_label,status")
    );
    for (line, theta) in lines.zip(["0.5", "0.9"]) {
        let cells: Vec<&str> = line.split(',').collect();
        let single = json(&["solve", "four-action", "--theta", theta, "--format", "json"]);
        assert_eq!(cells[1], theta);
        assert_eq!(cells[2].parse::<f64>().unwrap(), single["beta_star"].as_f64().unwrap());
        assert_eq!(cells[3], single["termination"]);
        assert_eq!(cells[6], "ok");
    }
}

#[test]
fn sweep_records_failing_points_and_continues() {
    let sweep = stdout(&["sweep", "four-action", "--param", "theta", "--range", "0.9:1.1:0.1"]);
    let rows: Vec<&str> = sweep.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].ends_with(",ok"));
    assert!(rows[1].contains("theta must be below 1"));
}

#[test]
fn pure_cycle_of_the_all_pay_auction() {
    let csv = stdout(&["cycle", "auction-all-pay", "--sigma", "0.4", "--pure"]);
    let labels: Vec<&str> = csv
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("1,"))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(labels, ["0", "0.05", "0.15", "0.3", "0.45", "0.55", "0.6", "0.65"]);
}

#[test]
fn table_output_has_reference_columns() {
    let csv = stdout(&["table", "table1"]);
    assert!(csv.starts_with("table,row,column,computed,reference,delta\n"));
    assert!(csv.lines().any(|l| l.starts_with("# max_abs_delta")));
}

#[test]
fn dump_game_round_trips_through_json() {
    let text = stdout(&["dump-game", "travelers", "--delta", "10", "--format", "json"]);
    let g = limit_qre::game::BimatrixGame::from_json(&text).unwrap();
    assert_eq!(g.dims(), (121, 121));
    let i = g.numeric_label_index(0, 150.0).unwrap();
    let j = g.numeric_label_index(1, 170.0).unwrap();
    assert_eq!(g.payoff_1()[(i, j)], 160.0);
    assert_eq!(g.payoff_2()[(i, j)], 140.0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"game": "four-action", "theta": 0.9, "nu": 0.02}"#).unwrap();
    let p = path.to_str().unwrap();
    let from_file = json(&["solve", "--config-file", p, "--format", "json"]);
    assert!((from_file["beta_star"].as_f64().unwrap() - 2.4).abs() < 1e-9);
    let overridden = json(&["solve", "--config-file", p, "--theta", "0.5", "--format", "json"]);
    assert!((overridden["beta_star"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((overridden["nu"].as_f64().unwrap() - 0.02).abs() < 1e-15);
}

#[test]
fn automatic_step_scales_with_payoffs() {
    let r = json(&[
        "solve",
        "four-action",
        "--theta",
        "0.5",
        "--nu",
        "auto",
        "--format",
        "json",
    ]);
    assert!((r["nu"].as_f64().unwrap() - 0.02).abs() < 1e-15);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["solve", "four-action", "--theta", "1.5"][..],
        &["solve", "four-action", "--delta", "10"],
        &["solve", "travelers"],
        &["solve", "--config-file", "/nonexistent/run.json"],
        &["table", "table9"],
        &["solve", "rps", "--model", "satisficing"],
        &["solve", "rps", "--nu", "fast"],
    ] {
        let out = limitqre(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"game": "rps", "precision": 3}"#).unwrap();
    let out = limitqre(&["solve", "--config-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let args = [
        "solve",
        "auction-first-price",
        "--sigma",
        "0.05",
        "--grid-delta",
        "0.1",
        "--format",
        "json",
    ];
    let one = stdout(&[&["--threads", "1"][..], &args].concat());
    let four = stdout(&[&["--threads", "4"][..], &args].concat());
    assert_eq!(one, four);
    assert_eq!(one, stdout(&args));
}
