use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    /// Passes when `value <= bound`.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Check {
        Check { name: name.to_string(), passed: value <= bound, value, bound }
    }

    /// Passes when `value > bound`.
    pub fn above(name: &str, value: f64, bound: f64) -> Check {
        Check { name: name.to_string(), passed: value > bound, value, bound }
    }
}

/// Deterministic part of a report, as produced by a command (and cached).
#[derive(Debug, Clone, Default, Serialize, serde::Deserialize)]
pub struct Outcome {
    pub result: Value,
    pub residuals: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn new(result: Value) -> Outcome {
        Outcome { result, ..Default::default() }
    }

    /// Record a residual with its bound.
    pub fn residual(&mut self, name: &str, value: f64, bound: f64) {
        self.residuals.insert(name.to_string(), value);
        self.checks.push(Check::at_most(name, value, bound));
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs_sha256: String,
    pub result: Value,
    pub residuals: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub cache: &'static str,
    pub timings: BTreeMap<String, f64>,
}

/// Round a float to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Round every float in a JSON value to 12 significant digits.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            n.as_f64().and_then(|x| serde_json::Number::from_f64(sig12(x))).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect::<Map<_, _>>()),
        v => v,
    }
}

pub fn to_json(report: &Report) -> String {
    let v = round_value(serde_json::to_value(report).expect("report serializes"));
    serde_json::to_string_pretty(&v).expect("value serializes")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => out.push(format!("{prefix}: {v}")),
    }
}

pub fn to_text(report: &Report) -> String {
    let v = round_value(serde_json::to_value(report).expect("report serializes"));
    let mut lines = vec![format!("command: {}", report.command.join(" "))];
    lines.push(format!("inputs_sha256: {}", report.inputs_sha256));
    flatten("result", &v["result"], &mut lines);
    for c in v["checks"].as_array().into_iter().flatten() {
        lines.push(format!(
            "[{}] {} = {} (bound {})",
            if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" },
            c["name"].as_str().unwrap_or(""),
            c["value"],
            c["bound"]
        ));
    }
    flatten("timings", &v["timings"], &mut lines);
    lines.push(format!("passed: {}", report.passed));
    lines.join("\n")
}
