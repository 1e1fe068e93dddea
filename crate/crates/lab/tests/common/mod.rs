#![allow(dead_code)]

use serde_json::Value;

/// Recomputes a report's verdict from its tables alone, without the
/// library's rule evaluator. Returns the per-check results and the verdict.
pub fn audit(report: &Value) -> (Vec<(String, bool)>, &'static str) {
    let tables = report["tables"].as_array().expect("tables");
    let column = |table: &str, col: &str| -> Vec<Value> {
        let t = tables.iter().find(|t| t["name"] == table).unwrap_or_else(|| panic!("table {table}"));
        let k = t["columns"].as_array().unwrap().iter().position(|c| c == col).unwrap_or_else(|| panic!("column {col}"));
        t["rows"].as_array().unwrap().iter().map(|r| r[k].clone()).collect()
    };
    let nums = |table: &str, col: &str| -> Vec<f64> {
        column(table, col).iter().map(|v| v.as_f64().unwrap_or_else(|| panic!("{table}.{col} not numeric"))).collect()
    };
    let mut results = Vec::new();
    let mut verdict = "PASS";
    for c in report["checks"].as_array().unwrap() {
        let r = &c["rule"];
        let table = r["table"].as_str().unwrap();
        let s = |k: &str| r[k].as_str().unwrap().to_string();
        let ok = match r["rule"].as_str().unwrap() {
            "at_least" => nums(table, &s("column")).iter().all(|&v| v >= r["bound"].as_f64().unwrap()),
            "at_most" => nums(table, &s("column")).iter().all(|&v| v <= r["bound"].as_f64().unwrap()),
            "below" => nums(table, &s("column")).iter().all(|&v| v < r["bound"].as_f64().unwrap()),
            "within" => {
                let (v, t, e) = (nums(table, &s("value")), nums(table, &s("target")), nums(table, &s("tol")));
                (0..v.len()).all(|i| (v[i] - t[i]).abs() <= e[i])
            }
            "monotone" => {
                let v = nums(table, &s("column"));
                let keys: Vec<String> = match r["group"].as_str() {
                    Some(g) => column(table, g).iter().map(|k| k.to_string()).collect(),
                    None => vec![String::new(); v.len()],
                };
                let dec = r["direction"] == "decreasing";
                let strict = r["strict"].as_bool().unwrap();
                let mut ok = true;
                for i in 0..v.len() {
                    if let Some(j) = (0..i).rev().find(|&j| keys[j] == keys[i]) {
                        let d = if dec { v[j] - v[i] } else { v[i] - v[j] };
                        ok &= if strict { d > 0.0 } else { d >= 0.0 };
                    }
                }
                ok
            }
            other => panic!("unknown rule {other}"),
        };
        if !ok && !c["informational"].as_bool().unwrap() {
            verdict = "FAIL";
        }
        results.push((c["name"].as_str().unwrap().to_string(), ok));
    }
    (results, verdict)
}

pub fn schema() -> Value {
    let text = include_str!("../../schema/report.schema.json");
    serde_json::from_str(text).expect("schema parses")
}

pub fn validate(report: &Value) -> Result<(), String> {
    let schema = schema();
    let v = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let errors: Vec<String> = v.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors.join("\n"))
    }
}
