//! Report envelope and deterministic serialization.
//!
//! Every machine-readable output is the same envelope — command name,
//! echoed parameters, payload, schema version — serialized by a local JSON
//! writer rather than serde_json's so that floats always carry 17
//! significant digits with a lowercase exponent and negative zero never
//! appears. Map keys come out sorted because `serde_json`'s default map is
//! ordered; identical invocations must produce identical bytes.

use std::collections::BTreeMap;

use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// One command's machine-readable output.
pub struct Report {
    pub command: &'static str,
    /// Resolved flag values, echoed as strings for the audit trail.
    pub parameters: BTreeMap<&'static str, String>,
    pub payload: Value,
    /// Unix seconds; present only when requested, since it breaks
    /// byte-level reproducibility by design.
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("command".into(), Value::String(self.command.into()));
        let params: serde_json::Map<String, Value> = self
            .parameters
            .iter()
            .map(|(k, v)| ((*k).to_string(), Value::String(v.clone())))
            .collect();
        root.insert("parameters".into(), Value::Object(params));
        root.insert("payload".into(), self.payload.clone());
        root.insert(
            "schema_version".into(),
            Value::String(SCHEMA_VERSION.into()),
        );
        if let Some(t) = self.timestamp {
            root.insert("timestamp".into(), Value::from(t));
        }
        let mut out = String::new();
        write_value(&mut out, &Value::Object(root), 0);
        out.push('\n');
        out
    }
}

/// Fixed-format float: 17 significant digits, lowercase scientific
/// exponent, negative zero normalized away.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_scalar(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().expect("number is int or float")));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("plain string serializes"));
        }
        _ => unreachable!("composites are handled by write_value"),
    }
}

/// Two-space-indented printer; arrays of scalars stay on one line so
/// `[re, im]` pairs and table rows read naturally.
fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_scalar(out, item);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                push_indent(out, indent + 1);
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                push_indent(out, indent + 1);
                out.push_str(&serde_json::to_string(k).expect("plain string serializes"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(out, indent);
            out.push('}');
        }
        scalar => write_scalar(out, scalar),
    }
}

fn push_indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

/// One TSV row; fields must not themselves contain tabs or newlines.
pub fn tsv_row(fields: &[String]) -> String {
    let mut line = fields.join("\t");
    line.push('\n');
    line
}
