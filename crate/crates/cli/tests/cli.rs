//! End-to-end checks of the command-line surface: exit codes, determinism,
//! CSV shapes, and the documented example invocations.

mod common;

use common::{bridgetail, stdout_json};

const DYCK: &str = "-1:1/2,1:1/2";
const MOTZKIN_CENTERED: &str = "1:1/3,0:1/3,-1:1/3";
const WALK2: &str = "2:1/6,0:1/2,-1:1/3";
const DUCHON: &str = "2:1,-3:1";
const WALLNER: &str = "1:1,-1:3,-2:1";

fn diff_f64(value: &serde_json::Value) -> f64 {
    value.as_str().expect("decimal string").parse().expect("parses as f64")
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let configs: Vec<Vec<&str>> = vec![
        vec!["analyze", "-p", DYCK],
        vec!["roots", "-p", DUCHON, "--samples", "10"],
        vec!["tail", "-p", DYCK, "--n", "32", "--x", "1", "--order", "3", "--compare", "dp"],
        vec!["verify", "-p", WALK2, "--suite", "wm-identity", "--samples", "3", "--seed", "7"],
    ];
    for args in configs {
        let first = bridgetail(&args);
        let second = bridgetail(&args);
        assert!(first.status.success(), "command {args:?} failed");
        assert_eq!(first.stdout, second.stdout, "non-deterministic output for {args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec![],
        vec!["analyze"],
        vec!["verify", "-p", DYCK, "--suite", "nonsense"],
        vec!["analyze", "-p", DYCK, "--format", "xml"],
    ] {
        let out = bridgetail(&args);
        assert_eq!(out.status.code(), Some(2), "expected usage error for {args:?}");
    }
}

#[test]
fn domain_errors_exit_1() {
    for args in [
        vec!["analyze", "-p", "1:abc"],
        vec!["analyze", "-p", "1:1"],
        vec!["tail", "-p", "1:1,-1:3", "--n", "10", "--x", "1"],
        vec!["tail", "-p", MOTZKIN_CENTERED, "--n", "64", "--x", "1", "--compare", "andre"],
        vec!["enumerate", "-p", DYCK, "--n", "-3"],
        vec!["roots", "-p", DYCK, "--radius", "2"],
        vec!["verify", "-p", WALLNER, "--suite", "rayleigh-scan"],
    ] {
        let out = bridgetail(&args);
        assert_eq!(out.status.code(), Some(1), "expected domain error for {args:?}");
        assert!(!out.stderr.is_empty(), "expected a diagnostic for {args:?}");
    }
}

#[test]
fn csv_outputs_start_with_headers() {
    let cases = [
        (vec!["analyze", "-p", DYCK], "field,value"),
        (vec!["enumerate", "-p", DYCK, "--n", "4"], "n,altitude,weight"),
        (
            vec!["tail", "-p", DYCK, "--n", "16", "--x", "1", "--order", "2"],
            "field,value",
        ),
        (vec!["expand", "-p", DYCK, "--order", "1"], "part,k,index,x_power,value"),
        (vec!["roots", "-p", DYCK, "--samples", "6"], "index,z_re,z_im,chain_ok"),
        (
            vec!["verify", "-p", DUCHON, "--suite", "periodic", "--n", "20"],
            "check,measured,bound,passed",
        ),
    ];
    for (mut args, header) in cases {
        args.push("--format");
        args.push("csv");
        let out = bridgetail(&args);
        assert!(out.status.success(), "command {args:?} failed");
        let text = String::from_utf8(out.stdout).expect("utf-8");
        let first = text.lines().next().unwrap_or("");
        assert_eq!(first, header, "wrong CSV header for {args:?}");
        assert!(text.lines().count() > 1, "expected data rows for {args:?}");
    }
}

#[test]
fn andre_benchmark_example() {
    let doc = stdout_json(&[
        "tail", "-p", DYCK, "--n", "64", "--x", "1", "--order", "7", "--compare", "andre",
    ]);
    assert_eq!(doc["threshold"], 8);
    assert_eq!(doc["comparison"]["method"], "andre");
    assert_eq!(doc["comparison"]["value_exact"], "431520/5389901");
    assert!(diff_f64(&doc["comparison"]["absolute_difference"]) < 1e-7);
}

#[test]
fn dp_comparison_agrees_on_centered_motzkin() {
    let doc = stdout_json(&[
        "tail", "-p", MOTZKIN_CENTERED, "--n", "96", "--x", "1", "--order", "5",
        "--compare", "dp",
    ]);
    assert_eq!(doc["threshold"], 8);
    assert!(diff_f64(&doc["comparison"]["absolute_difference"]) < 1e-4);
}

#[test]
fn enumerate_respects_ceiling() {
    let doc = stdout_json(&[
        "enumerate", "-p", MOTZKIN_CENTERED, "--n", "4", "--h", "1",
    ]);
    let entries = doc["entries"].as_array().expect("entries array");
    assert!(!entries.is_empty());
    for e in entries {
        assert!(e["altitude"].as_i64().expect("altitude") <= 1);
    }
    let bridges = doc["bridge_weights"].as_array().expect("bridge weights");
    assert_eq!(bridges[4]["weight"], "2/9");
}

#[test]
fn duchon_periodic_suite_passes() {
    let doc = stdout_json(&["verify", "-p", DUCHON, "--suite", "periodic"]);
    assert_eq!(doc["passed"], true);
    let names: Vec<&str> = doc["checks"]
        .as_array()
        .expect("checks")
        .iter()
        .map(|c| c["name"].as_str().expect("name"))
        .collect();
    assert_eq!(names, ["off-cycle-bridges-vanish", "rotation-identities"]);
}

#[test]
fn wallner_circle_scan_flags_one_arc() {
    let doc = stdout_json(&[
        "roots", "-p", WALLNER, "--radius", "0.0001", "--samples", "24",
    ]);
    assert!(doc["singularities"].is_null());
    assert!(doc["singularity_error"].is_string());
    let violations = doc["scan"]["violations"].as_array().expect("violations");
    assert!(!violations.is_empty(), "expected modulus-ordering violations");
    for v in violations {
        assert!(v.as_u64().expect("index") > 12, "violations cluster on the far arc");
    }
}

#[test]
fn failing_suite_reports_but_exits_zero() {
    let args = ["verify", "-p", DYCK, "--suite", "rayleigh-scan", "--n", "8"];
    let out = bridgetail(&args);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON");
    assert_eq!(doc["passed"], false);
    let failed: Vec<&str> = doc["checks"]
        .as_array()
        .expect("checks")
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().expect("name"))
        .collect();
    assert_eq!(failed, ["rayleigh-x-1"]);
}
