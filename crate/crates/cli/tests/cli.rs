//! End-to-end tests of the `drk` binary: exit-code policy, report shapes
//! against the shipped schemas, CSV validity, and reproducibility.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn drk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drk"))
        .args(args)
        .output()
        .expect("running drk")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

const B1: &str = r#"{"num":[0.5,0.5],"den":[1]}"#;
const B2: &str = r#"{"num":[0.5,-0.5],"den":[1]}"#;
const BZ: &str = r#"{"num":[0,1],"den":[1]}"#;

// ---------------------------------------------------------------------------
// minimal draft-07 subset validator: type, enum, properties, required,
// items, allOf, oneOf, and $ref into common.defs.json
// ---------------------------------------------------------------------------

struct Validator {
    defs: Value,
}

impl Validator {
    fn new() -> Self {
        let text = std::fs::read_to_string(schema_dir().join("common.defs.json")).unwrap();
        Validator { defs: serde_json::from_str(&text).unwrap() }
    }

    fn load(&self, name: &str) -> Value {
        let text = std::fs::read_to_string(schema_dir().join(name)).unwrap();
        serde_json::from_str(&text).unwrap()
    }

    /// Resolves a reference and returns the node plus the document that
    /// becomes the root for references inside it.
    fn resolve<'a>(&'a self, reference: &str, root: &'a Value) -> (&'a Value, &'a Value) {
        let (doc, pointer) = match reference.split_once('#') {
            Some(("", p)) => (root, p),
            Some(("common.defs.json", p)) => (&self.defs, p),
            _ => panic!("unsupported $ref {reference}"),
        };
        let node = doc.pointer(pointer).unwrap_or_else(|| panic!("dangling $ref {reference}"));
        (node, doc)
    }

    fn check(&self, value: &Value, schema: &Value, root: &Value, path: &str) -> Result<(), String> {
        if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
            let (node, doc) = self.resolve(reference, root);
            return self.check(value, node, doc, path);
        }
        if let Some(all) = schema.get("allOf").and_then(Value::as_array) {
            for sub in all {
                self.check(value, sub, root, path)?;
            }
        }
        if let Some(any) = schema.get("oneOf").and_then(Value::as_array) {
            if !any.iter().any(|sub| self.check(value, sub, root, path).is_ok()) {
                return Err(format!("{path}: no oneOf branch matched"));
            }
        }
        if let Some(expected) = schema.get("type") {
            let names: Vec<&str> = match expected {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                _ => vec![],
            };
            let actual = match value {
                Value::Null => "null",
                Value::Bool(_) => "boolean",
                Value::Number(n) => {
                    if n.is_i64() || n.is_u64() { "integer" } else { "number" }
                }
                Value::String(_) => "string",
                Value::Array(_) => "array",
                Value::Object(_) => "object",
            };
            let ok = names.iter().any(|n| *n == actual || (*n == "number" && actual == "integer"));
            if !ok {
                return Err(format!("{path}: expected {names:?}, got {actual}"));
            }
        }
        if let Some(options) = schema.get("enum").and_then(Value::as_array) {
            if !options.contains(value) {
                return Err(format!("{path}: {value} not in {options:?}"));
            }
        }
        if let (Some(props), Value::Object(map)) = (schema.get("properties"), value) {
            for (key, sub) in props.as_object().unwrap() {
                if let Some(v) = map.get(key) {
                    self.check(v, sub, root, &format!("{path}/{key}"))?;
                }
            }
        }
        if let (Some(required), Value::Object(map)) =
            (schema.get("required").and_then(Value::as_array), value)
        {
            for key in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required key {key}"));
                }
            }
        }
        if let (Some(items), Value::Array(arr)) = (schema.get("items"), value) {
            for (i, v) in arr.iter().enumerate() {
                self.check(v, items, root, &format!("{path}[{i}]"))?;
            }
        }
        Ok(())
    }

    fn validate(&self, value: &Value, schema_file: &str) {
        let schema = self.load(schema_file);
        if let Err(e) = self.check(value, &schema, &schema, "") {
            panic!("{schema_file} validation failed: {e}\nreport: {value:#}");
        }
    }
}

#[test]
fn extreme_reports_validate_and_classify() {
    let v = Validator::new();

    let report = stdout_json(&drk(&["extreme", "--symbol", BZ]));
    v.validate(&report, "extreme_report.schema.json");
    assert_eq!(report["result"]["verdict"], "extreme");
    assert_eq!(report["result"]["integral"], Value::Null);

    let report = stdout_json(&drk(&["extreme", "--symbol", B1]));
    v.validate(&report, "extreme_report.schema.json");
    assert_eq!(report["result"]["verdict"], "non_extreme");
    let integral = report["result"]["integral"].as_f64().unwrap();
    assert!((integral - 2.0 * 0.5f64.ln()).abs() < 1e-8);
}

#[test]
fn mate_report_matches_worked_example() {
    let v = Validator::new();
    let report = stdout_json(&drk(&["mate", "--symbol", B1]));
    v.validate(&report, "mate_report.schema.json");
    let a_num = report["result"]["a"]["num"].as_array().unwrap();
    assert!((a_num[0][0].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((a_num[1][0].as_f64().unwrap() + 0.5).abs() < 1e-10);
}

#[test]
fn equivalence_verdicts_and_exit_codes() {
    let v = Validator::new();
    // a negative verdict is not an error: exit 0
    let out = drk(&["equiv", "--which", "s", "--symbol", B1, "--symbol-b", B2]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    v.validate(&report, "equivalence_report.schema.json");
    assert_eq!(report["result"]["verdict"], "not_equivalent");
    assert!(report["result"]["witness"].is_array());
    assert!(report["result"]["max_discrepancy"].as_f64().unwrap() > 0.3);

    let report = stdout_json(&drk(&["equiv", "--which", "x", "--symbol", B1, "--symbol-b", B2]));
    v.validate(&report, "equivalence_report.schema.json");
    assert_eq!(report["result"]["verdict"], "equivalent");
    assert_eq!(report["result"]["witness"], Value::Null);
}

#[test]
fn adc_report_with_pair_comparison() {
    let v = Validator::new();
    let report = stdout_json(&drk(&["adc", "--symbol", B1, "--symbol-b", B2]));
    v.validate(&report, "adc_report.schema.json");
    assert_eq!(report["result"]["same_adc"], Value::Bool(false));
    let zeta = &report["result"]["points"][0]["zeta"];
    assert!((zeta[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((report["result"]["points"][0]["c"].as_f64().unwrap() - 0.5).abs() < 1e-8);
}

#[test]
fn verify_report_shape() {
    let v = Validator::new();
    let report = stdout_json(&drk(&["verify", "--symbol", B1, "--trunc", "16,32"]));
    v.validate(&report, "verify_report.schema.json");
    let rows = report["result"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n"], 16);
    for row in rows {
        for (_, value) in row["residual_table"].as_object().unwrap() {
            assert!(value.as_f64().unwrap().is_finite());
        }
    }
}

#[test]
fn example5_all_claims_pass() {
    let v = Validator::new();
    let report = stdout_json(&drk(&["example5"]));
    v.validate(&report, "example5_report.schema.json");
    assert_eq!(report["result"]["equiv_X"], "equivalent");
    assert_eq!(report["result"]["equiv_S"], "not_equivalent");
    assert_eq!(report["result"]["space_equal"], "not_equal");
    assert_eq!(report["result"]["all_pass"], Value::Bool(true));
}

#[test]
fn curvature_csv_is_parseable() {
    let dir = std::env::temp_dir().join("drk_cli_test_csv");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.csv");
    let out = drk(&[
        "curvature",
        "--which",
        "s",
        "--symbol",
        B1,
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
        "--grid-radii",
        "4",
        "--grid-angles",
        "8",
        "--random-points",
        "10",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        &csv::StringRecord::from(vec![
            "omega_re", "omega_im", "closed_form", "finite_difference", "abs_err"
        ])
    );
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        assert_eq!(record.len(), 5);
        let err: f64 = record[4].parse().unwrap();
        assert!(err.is_finite());
        rows += 1;
    }
    assert_eq!(rows, 4 * 8 + 10);
}

#[test]
fn exit_code_policy() {
    // malformed symbol JSON: exit 2
    let out = drk(&["extreme", "--symbol", "{not json"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // missing --symbol: exit 2
    let out = drk(&["extreme"]);
    assert_eq!(out.status.code(), Some(2));

    // symbol violating the sup-norm bound: exit 2 (input validation)
    let out = drk(&["extreme", "--symbol", r#"{"num":[2],"den":[1]}"#]);
    assert_eq!(out.status.code(), Some(2));

    // mate of an inner symbol: a math error, exit 3
    let out = drk(&["mate", "--symbol", BZ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reports_are_reproducible() {
    let args = ["equiv", "--which", "s", "--symbol", B1, "--symbol-b", B2, "--seed", "99"];
    let first = drk(&args);
    let second = drk(&args);
    assert_eq!(first.stdout, second.stdout);
    let report = stdout_json(&first);
    assert_eq!(report["config"]["grid"]["random_seed"], 99);
}
