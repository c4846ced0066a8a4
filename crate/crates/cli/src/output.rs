use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};
use tempfile::NamedTempFile;

use crate::{Failure, Format};

/// Report wrapped with the invocation parameters.
pub fn envelope(command: &str, seed: u64, precision: Option<u32>, report: Value) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), command.into());
    m.insert("seed".into(), seed.to_string().into());
    m.insert("precision".into(), precision.map_or(Value::Null, Value::from));
    m.insert("report".into(), report);
    Value::Object(m)
}

pub fn render(doc: &Value, rows: Option<&str>, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(doc).map_err(|e| Failure::Domain(e.to_string()))?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => csv_rows(&doc["report"], rows),
    }
}

/// Flattens `report[rows]` (or the report itself) into one CSV row per item.
fn csv_rows(report: &Value, rows: Option<&str>) -> Result<Vec<u8>, Failure> {
    let items: Vec<&Value> = match rows.map(|k| &report[k]) {
        Some(Value::Array(a)) => a.iter().collect(),
        _ => vec![report],
    };
    let flat: Vec<Vec<(String, String)>> = items
        .iter()
        .map(|v| {
            let mut out = Vec::new();
            flatten("", v, &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &flat {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Domain(e.to_string());
    w.write_record(&header).map_err(err)?;
    for row in &flat {
        let rec = header.iter().map(|h| {
            row.iter()
                .find(|(k, _)| k == h)
                .map_or("", |(_, v)| v.as_str())
        });
        w.write_record(rec).map_err(err)?;
    }
    w.into_inner().map_err(|e| Failure::Domain(e.to_string()))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Array(_) => out.push((prefix.to_string(), v.to_string())),
        _ => out.push((prefix.to_string(), v.to_string())),
    }
}

/// Writes via a temporary file in the target directory, then renames.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Failure> {
    let Some(path) = out else {
        std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Domain(e.to_string()))?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
