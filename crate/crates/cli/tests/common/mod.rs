//! Shared helpers for the CLI test suites: running the binary and validating
//! reports against the shipped schema documents.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_triverge")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("spawn triverge")
}

pub fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(name)
}

pub fn load_schema(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_path(name)).expect("read schema");
    serde_json::from_str(&text).expect("schema is JSON")
}

/// Validates `value` against the subset of JSON Schema the shipped documents
/// use: `type`, `enum`, `properties`, `required`, `additionalProperties`,
/// `items`, and `oneOf`. Returns the first violation found.
pub fn validate(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(variants) = schema.get("oneOf").and_then(Value::as_array) {
        let matches: Vec<usize> = variants
            .iter()
            .enumerate()
            .filter(|(_, v)| validate(v, value, path).is_ok())
            .map(|(i, _)| i)
            .collect();
        if matches.len() != 1 {
            return Err(format!("{path}: matched {} oneOf branches", matches.len()));
        }
    }

    if let Some(expected) = schema.get("enum").and_then(Value::as_array) {
        if !expected.contains(value) {
            return Err(format!("{path}: {value} not in enum {expected:?}"));
        }
    }

    if let Some(type_spec) = schema.get("type") {
        let names: Vec<&str> = match type_spec {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let actual = json_type(value);
        let ok = names
            .iter()
            .any(|&n| n == actual || (n == "number" && actual == "integer"));
        if !ok {
            return Err(format!("{path}: expected type {names:?}, got {actual}"));
        }
    }

    if let Some(object) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !object.contains_key(key) {
                    return Err(format!("{path}: missing required key {key:?}"));
                }
            }
        }
        let empty = serde_json::Map::new();
        let properties = schema
            .get("properties")
            .and_then(Value::as_object)
            .unwrap_or(&empty);
        let additional = schema
            .get("additionalProperties")
            .and_then(Value::as_bool)
            .unwrap_or(true);
        for (key, child) in object {
            match properties.get(key) {
                Some(child_schema) => {
                    validate(child_schema, child, &format!("{path}/{key}"))?;
                }
                None if !additional => {
                    return Err(format!("{path}: unexpected key {key:?}"));
                }
                None => {}
            }
        }
    }

    if let (Some(items), Some(array)) = (schema.get("items"), value.as_array()) {
        for (i, child) in array.iter().enumerate() {
            validate(items, child, &format!("{path}[{i}]"))?;
        }
    }

    Ok(())
}

fn json_type(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) if n.is_u64() || n.is_i64() => "integer",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

pub fn assert_valid(schema_name: &str, value: &Value) {
    let schema = load_schema(schema_name);
    if let Err(violation) = validate(&schema, value, "$") {
        panic!("report does not match {schema_name}: {violation}\nreport: {value}");
    }
}
