//! Rendering of result records as CSV or JSON.
//!
//! Records are serialized to JSON values first. CSV columns follow the field
//! order of the first record, with nested objects flattened into dotted names.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use twocenter::reproduce::sci17;
use twocenter::{Error, Result};

use crate::config::Format;

pub fn to_values<T: Serialize>(records: &[T]) -> Result<Vec<Value>> {
    records.iter().map(|r| serde_json::to_value(r).map_err(Error::from)).collect()
}

/// JSON text: a single object for one record, an array otherwise.
pub fn render_json(values: &[Value]) -> Result<String> {
    let text = if values.len() == 1 {
        serde_json::to_string_pretty(&values[0])?
    } else {
        serde_json::to_string_pretty(values)?
    };
    Ok(text + "\n")
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, Value)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) if items.iter().all(Value::is_number) => {
            let joined = items.iter().map(cell).collect::<Vec<_>>().join(";");
            out.push((prefix.to_string(), Value::String(joined)));
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) if !n.is_f64() => i.to_string(),
            (_, Some(u)) if !n.is_f64() => u.to_string(),
            _ => sci17(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// CSV text with a header row; floating-point cells carry 17 significant digits.
pub fn render_csv(values: &[Value]) -> Result<String> {
    let rows: Vec<Vec<(String, Value)>> = values
        .iter()
        .map(|v| {
            let mut out = vec![];
            flatten("", v, &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = vec![];
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for row in &rows {
        let map: Map<String, Value> = row.iter().cloned().collect();
        let line: Vec<String> = header.iter().map(|h| map.get(h).map(cell).unwrap_or_default()).collect();
        w.write_record(&line).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn render(values: &[Value], format: Format) -> Result<String> {
    match format {
        Format::Csv => render_csv(values),
        Format::Json => render_json(values),
    }
}

/// Writes to `path`, or to standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_and_keeps_field_order() {
        let v = vec![json!({"label": "1sσg", "R": 2.0, "params": {"alpha": 0.5, "n": 3}, "ok": true, "A": null})];
        let csv = render_csv(&v).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "label,R,params.alpha,params.n,ok,A");
        assert_eq!(lines.next().unwrap(), "1sσg,2.0000000000000000e0,5.0000000000000000e-1,3,true,");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let x = -1.2052684289898765_f64;
        let csv = render_csv(&[json!({ "E": x })]).unwrap();
        let cell = csv.lines().nth(1).unwrap();
        assert_eq!(cell.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_single_record_is_an_object() {
        let one = render_json(&[json!({"a": 1})]).unwrap();
        assert!(one.starts_with('{'));
        let two = render_json(&[json!({"a": 1}), json!({"a": 2})]).unwrap();
        assert!(two.starts_with('['));
    }
}
