//! Table and report formatting. Every number is printed with 17 significant digits.

use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comment line identifying the artifact version and configuration.
pub fn header(command: &str, config_hash: &str) -> String {
    format!("# dilute-fermi {VERSION} {command} config-sha256 {config_hash}\n")
}

/// A CSV table with a header comment.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(command: &str, config_hash: &str, columns: &[&str]) -> Self {
        let mut text = header(command, config_hash);
        text.push_str(&columns.join(","));
        text.push('\n');
        Table { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn blank(&mut self) {
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Rewrites every non-integer number in `v` in `{:.16e}` form.
pub fn fixed_precision(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => match n.as_f64() {
            Some(x) if x.is_finite() => Value::Number(num(x).parse().expect("formatted float is valid JSON")),
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(fixed_precision).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, fixed_precision(x))).collect()),
        other => other,
    }
}

pub fn json(v: &impl serde::Serialize) -> String {
    let value = fixed_precision(serde_json::to_value(v).expect("report serializes"));
    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        let v = serde_json::json!({"a": 0.5, "b": 3, "c": [1.0e-20]});
        let s = json(&v);
        assert!(s.contains("\"a\": 5.0000000000000000e-1"), "{s}");
        assert!(s.contains("\"b\": 3"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["c"][0].as_f64(), Some(1.0e-20));
        assert_eq!(back["a"].as_f64(), Some(0.5));
    }
}
