//! Self-describing CSV and JSON tables.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Explicit choice, else `.json` extension, else CSV.
    pub fn resolve(explicit: Option<Format>, out: Option<&Path>) -> Format {
        explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

pub struct Table {
    pub command: &'static str,
    pub params: Vec<(&'static str, Value)>,
    pub seed: Option<u64>,
    /// Extra metadata: CSV comment lines and a JSON `meta` entry.
    pub notes: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# twinsg {} version={}", self.command, env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.params {
            let _ = write!(out, " {k}={}", plain(v));
        }
        if let Some(seed) = self.seed {
            let _ = write!(out, " seed={seed}");
        }
        out.push('\n');
        for (k, v) in &self.notes {
            match v {
                Value::Array(items) => {
                    for item in items {
                        let _ = writeln!(out, "# {k}: {}", plain(item));
                    }
                }
                other => {
                    let _ = writeln!(out, "# {k}: {}", plain(other));
                }
            }
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let mut meta = Map::new();
        meta.insert("command".into(), json!(self.command));
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        meta.insert("params".into(), Value::Object(params));
        meta.insert("seed".into(), json!(self.seed));
        for (k, v) in &self.notes {
            meta.insert(k.to_string(), v.clone());
        }
        let data: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().zip(row).map(|(c, x)| (c.to_string(), json!(x))).collect()))
            .collect();
        let mut text = serde_json::to_string_pretty(&json!({ "meta": meta, "data": data })).expect("finite values");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
