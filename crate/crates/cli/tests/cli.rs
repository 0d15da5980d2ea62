//! End-to-end tests for the `friendliness` binary: exit-code contract,
//! serialization round-trips, and override plumbing.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use friendliness_core::behavior::Behavior;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_friendliness"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("friendliness-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

#[test]
fn simulate_of_defaults_to_a_four_row_json_table() {
    let output = run(&["simulate", "--scenario", "of"]);
    assert_eq!(output.status.code(), Some(0));
    let behavior = Behavior::from_json(&stdout(&output)).expect("valid behavior JSON");
    assert_eq!(behavior.n_setting_tuples(), 4);
    assert_eq!(behavior.outcomes().len(), 2);
}

#[test]
fn simulate_ofx_csv_has_nine_setting_rows() {
    let output = run(&["simulate", "--scenario", "ofx", "--format", "csv"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert_eq!(text.lines().count(), 1 + 9);
    assert!(text.starts_with("x,y,"));
}

#[test]
fn simulate_out_file_round_trips_bit_exactly() {
    let path = scratch("lf-roundtrip.json");
    let output = run(&[
        "simulate",
        "--scenario",
        "lf",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let written = fs::read_to_string(&path).expect("output file exists");
    let reparsed = Behavior::from_json(&written).expect("file parses");
    assert_eq!(reparsed.to_json(), written);
}

#[test]
fn simulate_leaves_no_temp_files_behind() {
    let path = scratch("no-temps.json");
    let output = run(&[
        "simulate",
        "--scenario",
        "of",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let dir = path.parent().unwrap();
    let leftovers: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.contains(".tmp."))
        .collect();
    assert!(leftovers.is_empty(), "temp files left: {leftovers:?}");
}

#[test]
fn verify_of_establishes_the_contradiction_at_tsirelson() {
    let output = run(&["verify", "of"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("\"verdict\": \"contradiction_established\""));
    assert!(text.contains("2.828427"));
}

#[test]
fn verify_lf_establishes_the_contradiction() {
    let output = run(&["verify", "lf"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("\"verdict\": \"contradiction_established\""));
}

#[test]
fn verify_of_exits_two_when_a_joint_exists() {
    // Charlie aligned with the preparation basis makes the run classical.
    let output = run(&["verify", "of", "--charlie-angle", "pi/4"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).contains("\"verdict\": \"joint_exists\""));
}

#[test]
fn verify_appendix_b_establishes_the_separation() {
    let output = run(&["verify", "appendix-b"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("\"verdict\": \"separation_established\""));
}

#[test]
fn verify_pretty_format_summarizes_the_premises() {
    let output = run(&["verify", "of", "--format", "pretty"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.contains("premise checks:"));
    assert!(text.contains("verdict: contradiction_established"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_rejects_csv_output() {
    let output = run(&["verify", "of", "--format", "csv"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn check_fine_accepts_fair_coin_tables() {
    let path = scratch("coins.json");
    fs::write(
        &path,
        r#"{
  "variables": [["a", 2], ["b", 2], ["c", 2], ["d", 2]],
  "constraints": [
    {"subset": ["a", "b"], "target": [0.25, 0.25, 0.25, 0.25]},
    {"subset": ["a", "d"], "target": [0.25, 0.25, 0.25, 0.25]},
    {"subset": ["c", "b"], "target": [0.25, 0.25, 0.25, 0.25]},
    {"subset": ["c", "d"], "target": [0.25, 0.25, 0.25, 0.25]}
  ]
}"#,
    )
    .unwrap();
    let output = run(&["check", "fine", "--marginals", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("\"feasible\": true"));
}

#[test]
fn check_chsh_flags_the_tsirelson_behavior() {
    let path = scratch("lf-behavior.json");
    let sim = run(&[
        "simulate",
        "--scenario",
        "lf",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(sim.status.code(), Some(0));
    let output = run(&["check", "chsh", "--behavior", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).contains("2.828427"));
}

#[test]
fn check_membership_rejects_the_tsirelson_behavior() {
    let path = scratch("lf-membership.json");
    let sim = run(&[
        "simulate",
        "--scenario",
        "lf",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(sim.status.code(), Some(0));
    let output = run(&["check", "membership", "--behavior", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).contains("\"feasible\": false"));
}

#[test]
fn check_membership_accepts_a_local_behavior() {
    // All four lf angles equal: every correlator is −1, CHSH = 2 exactly.
    let cfg = scratch("lf-local.json");
    fs::write(
        &cfg,
        r#"{"charlie_angle": "0", "debbie_angle": "0", "alice_undo_angle": "0", "bob_undo_angle": "0"}"#,
    )
    .unwrap();
    let behavior = scratch("lf-local-behavior.json");
    let sim = run(&[
        "simulate",
        "--scenario",
        "lf",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        behavior.to_str().unwrap(),
    ]);
    assert_eq!(sim.status.code(), Some(0));
    let output = run(&[
        "check",
        "membership",
        "--behavior",
        behavior.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("\"feasible\": true"));
}

#[test]
fn check_prep_equivalence_accepts_the_protocol_mixtures() {
    let lhs = scratch("ens-lhs.json");
    let rhs = scratch("ens-rhs.json");
    fs::write(
        &lhs,
        r#"[{"weight": 0.5, "angle": "pi/4"}, {"weight": 0.5, "angle": "5pi/4"}]"#,
    )
    .unwrap();
    fs::write(
        &rhs,
        r#"[{"weight": 0.5, "angle": "3pi/4"}, {"weight": 0.5, "angle": "7pi/4"}]"#,
    )
    .unwrap();
    let output = run(&[
        "check",
        "prep-equivalence",
        "--lhs",
        lhs.to_str().unwrap(),
        "--rhs",
        rhs.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("\"equivalent\": true"));
}

#[test]
fn check_prep_equivalence_exits_two_for_distinguishable_mixtures() {
    let lhs = scratch("ens-biased.json");
    let rhs = scratch("ens-uniform.json");
    fs::write(&lhs, r#"[{"weight": 1.0, "angle": "0"}]"#).unwrap();
    fs::write(
        &rhs,
        r#"[{"weight": 0.5, "angle": "0"}, {"weight": 0.5, "angle": "pi"}]"#,
    )
    .unwrap();
    let output = run(&[
        "check",
        "prep-equivalence",
        "--lhs",
        lhs.to_str().unwrap(),
        "--rhs",
        rhs.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).contains("\"equivalent\": false"));
}

#[test]
fn operational_errors_exit_one() {
    let missing = run(&["check", "fine", "--marginals", "/nonexistent/x.json"]);
    assert_eq!(missing.status.code(), Some(1));

    let bad_scenario = run(&["simulate", "--scenario", "bogus"]);
    assert_eq!(bad_scenario.status.code(), Some(1));

    let bad_angle = run(&["verify", "of", "--charlie-angle", "3tau/4"]);
    assert_eq!(bad_angle.status.code(), Some(1));

    let schema = scratch("bad-schema.json");
    fs::write(&schema, r#"{"variables": "nope"}"#).unwrap();
    let bad_schema = run(&["check", "fine", "--marginals", schema.to_str().unwrap()]);
    assert_eq!(bad_schema.status.code(), Some(1));

    let unknown_field = scratch("bad-field.json");
    fs::write(&unknown_field, r#"{"charlie_basis": "pi/4"}"#).unwrap();
    let out = bin()
        .args(["verify", "of", "--config", unknown_field.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("charlie_basis"),
        "diagnostic names the field: {err}"
    );
}

#[test]
fn extension_flags_are_rejected_outside_ofx() {
    let output = run(&["simulate", "--scenario", "of", "--x2-rotation", "-pi/4"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn identical_invocations_produce_byte_identical_reports() {
    let a = run(&["verify", "appendix-b"]);
    let b = run(&["verify", "appendix-b"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn ofx_overrides_reach_the_extended_scenario() {
    // Zero rotation at x=2 makes the x=2 block coincide with x=1.
    let output = run(&[
        "simulate",
        "--scenario",
        "ofx",
        "--x2-rotation",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let behavior = Behavior::from_json(&stdout(&output)).unwrap();
    for y in 0..3 {
        let row1 = behavior.prob_row(&[1, y]).to_vec();
        let row2 = behavior.prob_row(&[2, y]).to_vec();
        for (p1, p2) in row1.iter().zip(&row2) {
            assert!((p1 - p2).abs() < 1e-12);
        }
    }
}
