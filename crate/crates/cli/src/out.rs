use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: u64 = 1;

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map(round12).and_then(serde_json::Number::from_f64).map(Value::Number).unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// `{"schema": 1, "command": ..., <fields of body>}` with every float at 12
/// significant digits.
pub fn document<T: Serialize>(command: &str, body: &T) -> anyhow::Result<String> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA));
    m.insert("command".into(), Value::from(command));
    match serde_json::to_value(body)? {
        Value::Object(b) => m.extend(b),
        other => {
            m.insert("result".into(), other);
        }
    }
    Ok(serde_json::to_string_pretty(&round_value(Value::Object(m)))?)
}

pub fn csv_number(v: f64) -> String {
    format!("{:.11e}", v)
}
