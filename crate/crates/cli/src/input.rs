//! Reading scan files back for `estimate`.

use serde_json::Value;

use crate::angle::parse_angle;
use crate::error::CliError;

#[derive(Debug)]
pub struct ScanFile {
    pub phi_l: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

pub fn read_scan(text: &str) -> Result<ScanFile, CliError> {
    if text.trim_start().starts_with('{') {
        read_json(text)
    } else {
        read_csv(text)
    }
}

fn read_csv(text: &str) -> Result<ScanFile, CliError> {
    let mut phi_l = None;
    for (n, line) in text.lines().enumerate().take_while(|(_, l)| l.starts_with('#')) {
        if let Some(v) = line.split_whitespace().find_map(|tok| tok.strip_prefix("phi_l=")) {
            phi_l = Some(parse_angle(v).map_err(|e| parse_err(format!("line {}: {e}", n + 1)))?);
        }
    }

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(format!("header: {e}")))?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(x_col), Some(y_col)) = (column("phi_r"), column("intensity")) else {
        return Err(parse_err(format!("header must name phi_r and intensity columns, found '{}'", headers.iter().collect::<Vec<_>>().join(","))));
    };
    let lambda_col = column("lambda");

    let mut samples = Vec::new();
    let mut lambda_seen: Option<f64> = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(format!("line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |col: usize, name: &str| -> Result<f64, CliError> {
            let raw = record.get(col).ok_or_else(|| parse_err(format!("line {line}: missing {name}")))?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(format!("line {line}: cannot read {name} value '{raw}'")))
        };
        if let Some(c) = lambda_col {
            let l = field(c, "lambda")?;
            match lambda_seen {
                Some(prev) if prev != l => {
                    return Err(parse_err(format!("line {line}: file holds more than one curve (lambda {prev} and {l})")))
                }
                _ => lambda_seen = Some(l),
            }
        }
        samples.push((field(x_col, "phi_r")?, field(y_col, "intensity")?));
    }
    Ok(ScanFile { phi_l, samples })
}

fn read_json(text: &str) -> Result<ScanFile, CliError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let phi_l = doc.pointer("/meta/params/phi_l").and_then(Value::as_f64);
    let rows = doc
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing top-level 'data' array"))?;
    let mut samples = Vec::with_capacity(rows.len());
    let mut lambda_seen: Option<f64> = None;
    for (i, row) in rows.iter().enumerate() {
        let field = |name: &str| {
            row.get(name)
                .and_then(Value::as_f64)
                .ok_or_else(|| parse_err(format!("data[{i}]: missing or non-numeric '{name}'")))
        };
        if row.get("lambda").is_some() {
            let l = field("lambda")?;
            match lambda_seen {
                Some(prev) if prev != l => {
                    return Err(parse_err(format!("data[{i}]: file holds more than one curve (lambda {prev} and {l})")))
                }
                _ => lambda_seen = Some(l),
            }
        }
        samples.push((field("phi_r")?, field("intensity")?));
    }
    Ok(ScanFile { phi_l, samples })
}
