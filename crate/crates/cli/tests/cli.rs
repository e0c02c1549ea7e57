//! End-to-end runs of the kronwit binary: golden determinism, the exit-code
//! contract, and tamper detection.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kronwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronwit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const Z_CONFIG: &str = r#"{
  "group": { "explicit": { "factors": [ { "kind": "rationals" } ] } },
  "set": { "rule": "geometric", "base": 3 },
  "build": { "rounds": 4, "seed": 11 }
}"#;

fn stderr_error(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr not JSON ({e}): {text}"))
}

#[test]
fn construct_is_deterministic_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(&config, Z_CONFIG);
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    for out in [&first, &second] {
        let output = kronwit(&[
            "construct",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    }
    assert_eq!(
        fs::read(&first).unwrap(),
        fs::read(&second).unwrap(),
        "same config and seed must be byte-identical"
    );

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(report["kind"], "construction-report");
    assert_eq!(report["config"]["build"]["seed"], 11);
    assert_eq!(report["result"]["kind"], "construction-result");
    assert_eq!(report["result"]["provenance"]["case"], "case1-bounded");
    assert!(report["summary"].as_array().is_some_and(|s| !s.is_empty()));

    let verify = kronwit(&["verify", first.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    let stdout: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&verify.stdout).trim()).unwrap();
    assert_eq!(stdout["verified"], true);
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(&config, Z_CONFIG);
    let out = dir.path().join("out.json");
    let output = kronwit(&[
        "construct",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["build"]["seed"], 99);
    assert_eq!(report["result"]["provenance"]["seed"], 99);
}

#[test]
fn order_two_stream_takes_the_independence_branch() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(
        &config,
        r#"{
          "group": { "uniform": { "factor": { "kind": "cyclic", "n": 2 } } },
          "set": { "rule": "unit-generators" },
          "build": { "rounds": 4, "seed": 5 }
        }"#,
    );
    let out = dir.path().join("out.json");
    let output = kronwit(&[
        "construct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["result"]["provenance"]["case"], "case2-order-two");
    assert!(report["result"]["independence"].is_object());
    assert_eq!(report["result"]["bound_turns"], "1/4");
}

#[test]
fn zero_rounds_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(
        &config,
        r#"{
          "group": { "explicit": { "factors": [ { "kind": "rationals" } ] } },
          "set": { "rule": "geometric", "base": 3 },
          "build": { "rounds": 0 }
        }"#,
    );
    let output = kronwit(&["construct", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let error = stderr_error(&output);
    assert_eq!(error["error"]["kind"], "invalid-config");
}

#[test]
fn tampering_names_the_offending_element() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(&config, Z_CONFIG);
    let out = dir.path().join("out.json");
    let output = kronwit(&[
        "construct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let mut report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    report["result"]["e_certificate"]["points"][0]["achieved"] = "9/20".into();
    let tampered = dir.path().join("tampered.json");
    write(&tampered, &report.to_string());

    let verify = kronwit(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(1));
    let error = stderr_error(&verify);
    assert_eq!(error["error"]["kind"], "verification");
    assert_eq!(error["error"]["detail"]["point"], 0);
    assert!(error["error"]["detail"]["element"]["support"].is_array());
}

#[test]
fn truncated_documents_are_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(&config, Z_CONFIG);
    let out = dir.path().join("out.json");
    kronwit(&[
        "construct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&out).unwrap();
    let truncated = dir.path().join("truncated.json");
    write(&truncated, &text[..text.len() / 2]);
    let verify = kronwit(&["verify", truncated.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(2));
    assert_eq!(stderr_error(&verify)["error"]["kind"], "parse");
}

#[test]
fn witness_reports_hits_and_inconclusive_misses() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write(&config, Z_CONFIG);
    let out = dir.path().join("out.json");
    kronwit(&[
        "construct",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let hit = kronwit(&["witness", out.to_str().unwrap(), "--m", "2", "--seed", "7"]);
    assert_eq!(hit.status.code(), Some(0), "{}", String::from_utf8_lossy(&hit.stderr));
    let report: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&hit.stdout).trim()).unwrap();
    assert_eq!(report["inconclusive"], false);
    assert!(report["report"]["found"]["index"].is_number());

    // Four rounds leave no covering stages, so this seed's spec finds no
    // admissible pair; the sweep must say so and exit 1.
    let miss_out = dir.path().join("miss.json");
    let miss = kronwit(&[
        "witness",
        out.to_str().unwrap(),
        "--m",
        "5",
        "--seed",
        "4",
        "--out",
        miss_out.to_str().unwrap(),
    ]);
    assert_eq!(miss.status.code(), Some(1));
    assert_eq!(stderr_error(&miss)["error"]["kind"], "witness");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&miss_out).unwrap()).unwrap();
    assert_eq!(report["inconclusive"], true);
    assert!(report["report"]["found"].is_null());
    assert_eq!(report["report"]["pairs_examined"], 4);
}

#[test]
fn oracle_pins_the_two_point_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("oracle.json");
    write(
        &config,
        r#"{ "elements": ["1", "2"], "targets": ["0/1", "1/2"], "grid": 600000 }"#,
    );
    let output = kronwit(&["oracle", "--config", config.to_str().unwrap()]);
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&output.stdout).trim()).unwrap();
    assert_eq!(report["grid_argmin"], 100000);
    let chord = report["grid_min_max_chord_approx"].as_f64().unwrap();
    assert!((chord - 1.0).abs() < 1e-3);

    // The --grid flag overrides the config resolution.
    let coarse = kronwit(&[
        "oracle",
        "--config",
        config.to_str().unwrap(),
        "--grid",
        "60000",
    ]);
    assert!(coarse.status.success());
    let report: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&coarse.stdout).trim()).unwrap();
    assert_eq!(report["grid"], 60000);
    assert_eq!(report["grid_argmin"], 10000);
}
