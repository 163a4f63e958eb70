//! Validates each subcommand's JSON output against the schema files shipped
//! under `schemas/`, using a small validator covering the subset of JSON
//! Schema the published files rely on: `type` (single or list), `enum`,
//! `required`, `properties`, `additionalProperties: false`, and `items`.

mod common;

use common::stdout_json;
use serde_json::Value;

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "null" => value.is_null(),
        "boolean" => value.is_boolean(),
        "string" => value.is_string(),
        "integer" => value.is_i64() || value.is_u64(),
        "number" => value.is_number(),
        "array" => value.is_array(),
        "object" => value.is_object(),
        other => panic!("unsupported type keyword `{other}`"),
    }
}

fn check(schema: &Value, value: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(allowed) = schema.get("enum") {
        let variants = allowed.as_array().expect("enum is an array");
        if !variants.iter().any(|v| v == value) {
            errors.push(format!("{path}: {value} not in enum {allowed}"));
        }
        return;
    }
    if let Some(ty) = schema.get("type") {
        let names: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list
                .iter()
                .map(|v| v.as_str().expect("type list holds strings"))
                .collect(),
            _ => panic!("malformed type at {path}"),
        };
        if !names.iter().any(|n| type_matches(n, value)) {
            errors.push(format!("{path}: expected type {names:?}, got {value}"));
            return;
        }
    }
    if value.is_null() {
        return;
    }
    if let Some(obj) = value.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().expect("required holds strings");
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required key `{key}`"));
                }
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if props.map_or(true, |p| !p.contains_key(key)) {
                    errors.push(format!("{path}: unexpected key `{key}`"));
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    check(sub, v, &format!("{path}.{key}"), errors);
                }
            }
        }
    }
    if let Some(list) = value.as_array() {
        if let Some(items) = schema.get("items") {
            for (i, v) in list.iter().enumerate() {
                check(items, v, &format!("{path}[{i}]"), errors);
            }
        }
    }
}

fn load_schema(name: &str) -> Value {
    let path = format!("{}/../../schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read schema {path}: {e}"));
    serde_json::from_str(&text).expect("schema file is JSON")
}

fn assert_valid(schema_name: &str, args: &[&str]) {
    let schema = load_schema(schema_name);
    let doc = stdout_json(args);
    let mut errors = Vec::new();
    check(&schema, &doc, "$", &mut errors);
    assert!(
        errors.is_empty(),
        "output of {args:?} violates {schema_name} schema:\n{}",
        errors.join("\n")
    );
}

#[test]
fn analyze_outputs_validate() {
    assert_valid("analyze", &["analyze", "-p", "-1:1/2,1:1/2"]);
    assert_valid("analyze", &["analyze", "-p", "1:1,0:1,-1:1"]);
}

#[test]
fn enumerate_outputs_validate() {
    assert_valid(
        "enumerate",
        &["enumerate", "-p", "1:1/3,0:1/3,-1:1/3", "--n", "6", "--h", "2"],
    );
    assert_valid(
        "enumerate",
        &["enumerate", "-p", "-1:1/2,1:1/2", "--n", "5", "--mode", "float"],
    );
}

#[test]
fn tail_outputs_validate() {
    let base = ["tail", "-p", "-1:1/2,1:1/2", "--n", "16", "--x", "1", "--order", "3"];
    assert_valid("tail", &base);
    let mut andre = base.to_vec();
    andre.extend(["--compare", "andre"]);
    assert_valid("tail", &andre);
    let mut dp = base.to_vec();
    dp.extend(["--compare", "dp", "--mode", "float"]);
    assert_valid("tail", &dp);
}

#[test]
fn expand_outputs_validate() {
    assert_valid("expand", &["expand", "-p", "2:1/6,0:1/2,-1:1/3", "--order", "3"]);
}

#[test]
fn roots_outputs_validate() {
    assert_valid("roots", &["roots", "-p", "2:1,-3:1", "--samples", "10"]);
    assert_valid(
        "roots",
        &["roots", "-p", "1:1,-1:3,-2:1", "--radius", "0.0001", "--samples", "16"],
    );
}

#[test]
fn verify_outputs_validate() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "-p", "-1:1/2,1:1/2", "--suite", "domination", "--samples", "12"],
        vec!["verify", "-p", "2:1,-3:1", "--suite", "periodic", "--n", "30"],
        vec!["verify", "-p", "2:1/6,0:1/2,-1:1/3", "--suite", "series", "--order", "12"],
        vec!["verify", "-p", "-1:1/2,1:1/2", "--suite", "wm-identity", "--samples", "2", "--seed", "3"],
        vec!["verify", "-p", "2:1/6,0:1/2,-1:1/3", "--suite", "bh-identity", "--samples", "2"],
        vec!["verify", "-p", "-1:1/2,1:1/2", "--suite", "rayleigh-scan", "--n", "64"],
    ];
    for args in &cases {
        assert_valid("verify", args);
    }
}
