//! Report envelopes and a deterministic JSON writer.

use serde::Serialize;
use serde_json::Value;

/// Machine-readable result of one command invocation.
#[derive(Clone, Debug, Serialize)]
pub struct ReportEnvelope {
    pub scenario: String,
    pub config: Value,
    pub seed: u64,
    pub results: Value,
    pub pass: bool,
    /// Wall-clock time; `None` unless timing was requested, keeping reports reproducible.
    pub runtime_ms: Option<u64>,
}

impl ReportEnvelope {
    pub fn new(scenario: impl Into<String>, config: impl Serialize, seed: u64, results: impl Serialize, pass: bool) -> Self {
        Self { scenario: scenario.into(), config: to_value(&config), seed, results: to_value(&results), pass, runtime_ms: None }
    }

    pub fn to_json(&self) -> String {
        write_json(&to_value(self))
    }
}

/// Converts to a JSON tree; non-finite floats become `null`.
pub fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report payloads serialize")
}

/// Pretty-prints with floats at 17 significant digits (`{:.16e}`), so equal
/// bit patterns always give equal bytes.
pub fn write_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64 number");
                out.push_str(&format_float(x));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|x| matches!(x, Value::Number(_) | Value::Bool(_) | Value::Null)) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, level, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                indent(level + 1, out);
                write_value(x, level + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                indent(level + 1, out);
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(x, level + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            indent(level, out);
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_keep_all_digits() {
        let s = write_json(&json!({"a": std::f64::consts::PI, "b": 3, "c": [0.5, true]}));
        assert!(s.contains("3.1415926535897931e0"));
        assert!(s.contains("\"b\": 3"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn envelope_round_trips() {
        let e = ReportEnvelope::new("x", json!({"n": 3}), 7, json!({"r": 0.1}), true);
        let v: Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["runtime_ms"], Value::Null);
        assert_eq!(e.to_json(), e.to_json());
    }
}
