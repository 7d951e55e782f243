//! Black-box tests of the command-line binary: output shapes, JSON
//! round-trips, exit codes, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use quadorder::QuadratureRule;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadorder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn rule_table_shows_radau_left_values() {
    let out = run(&["rule", "--family", "radau-left", "--points", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("exact to degree 2"), "{text}");
    assert!(text.contains("0.250000000000000"), "{text}");
    assert!(text.contains("0.66666666666666"), "{text}");
    assert!(text.contains("0.750000000000000"), "{text}");
}

#[test]
fn rule_json_round_trips() {
    let out = run(&["rule", "--family", "gauss", "--points", "4", "--json"]);
    assert!(out.status.success());
    let parsed: QuadratureRule = serde_json::from_str(&stdout(&out)).expect("valid rule JSON");
    let unit = quadorder::Interval::new(0.0, 1.0).unwrap();
    let direct = quadorder::rules::gauss(4, unit).unwrap();
    assert_eq!(parsed, direct);
}

#[test]
fn compare_reports_shared_moments() {
    let out = run(&[
        "compare",
        "--rule1",
        "gauss:3",
        "--rule2",
        "lobatto:4",
        "--order",
        "3",
        "--interval",
        "-1,1",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "incomparable (shared moments: 5)");
}

#[test]
fn certify_exit_codes_track_verdicts() {
    // Identical measures: certified, exit 0.
    let out = run(&["certify", "--first", "uniform", "--second", "uniform", "--order", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // Midpoint mass below uniform in convex order: certified, exit 0.
    let out = run(&["certify", "--first", "dirac:0.5", "--second", "uniform", "--order", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // Second moments differ, so order 2 is refuted by a monomial witness.
    let out = run(&["certify", "--first", "dirac:0.5", "--second", "uniform", "--order", "2"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));

    // Five shared moments but five crossings: inconclusive, exit 2.
    let out = run(&[
        "certify",
        "--first",
        "gauss:3",
        "--second",
        "lobatto:4",
        "--order",
        "3",
        "--interval",
        "-1,1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
}

#[test]
fn measure_files_load_and_errors_use_data_exit_code() {
    let good = tmp_path("measure_good.json");
    std::fs::write(
        &good,
        r#"{"interval":[0,1],"atoms":[{"x":0.25,"w":0.5}],"pieces":[{"support":[0,1],"coeffs":[0.5]}]}"#,
    )
    .unwrap();
    let out = run(&["moments", "--measure", good.to_str().unwrap(), "--max-k", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let m1 = v["moments"][1]["moment"].as_f64().unwrap();
    // 0.5 * 0.25 + 0.5 * 0.5 = 0.375.
    assert!((m1 - 0.375).abs() < 1e-15);

    let bad = tmp_path("measure_bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["moments", "--measure", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
    assert!(out.stdout.is_empty());

    let out = run(&["moments", "--measure", "no_such_file.json"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn usage_errors_exit_64() {
    let out = run(&["rule", "--family", "simpson", "--points", "3"]);
    assert_eq!(out.status.code(), Some(64));

    let out = run(&["rule", "--family", "gauss", "--interval", "banana"]);
    assert_eq!(out.status.code(), Some(64));

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn crossings_emit_plot_data() {
    let csv_path = tmp_path("crossings_plot.csv");
    let out = run(&[
        "crossings",
        "--first",
        "uniform",
        "--second",
        "gauss:2",
        "--plot-data",
        csv_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["count"], 3);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,F1,F2,diff,is_crossing"));
    let markers = lines.filter(|l| l.ends_with(",1")).count();
    assert_eq!(markers, 3, "crossing markers in CSV");
    // 2048 samples + 3 markers.
    assert_eq!(csv.lines().count(), 2052);
}

#[test]
fn sandwich_certifies_uniform_and_rejects_bad_hypothesis() {
    let out = run(&["sandwich", "--measure", "uniform", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // An off-center point mass misses the first uniform moment.
    let out = run(&["sandwich", "--measure", "dirac:0.3", "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("moment hypothesis fails at k = 1"), "{err}");
}

#[test]
fn same_argv_and_seed_give_byte_identical_output() {
    let args = [
        "verify-corpus",
        "--order",
        "2",
        "--count",
        "5",
        "--seed",
        "3",
        "--json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}
