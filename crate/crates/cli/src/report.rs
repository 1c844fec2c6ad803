//! Experiment reports and their three renderings.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Keys are kept sorted (serde_json's default map), so equal inputs give
/// byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub params: Map<String, Value>,
    pub results: Map<String, Value>,
    pub seed: u64,
    pub version: String,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, params: Value, results: Value) -> Result<Self, CliError> {
        let obj = |v: Value, what: &str| match v {
            Value::Object(m) => Ok(m),
            _ => Err(CliError::Internal(format!("{what} must be an object"))),
        };
        let mut params = obj(params, "params")?;
        // unset optional arguments are omitted rather than written as null
        params.retain(|_, v| !v.is_null());
        let report = Self {
            experiment: experiment.to_string(),
            params,
            results: obj(results, "results")?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        // serde_json turns non-finite floats into null; no report field is
        // nullable, so any null means a NaN or infinity slipped through.
        if let Some(path) = find_null(&Value::Object(report.results.clone()), "results") {
            return Err(CliError::Internal(format!("non-finite value at {path}")));
        }
        Ok(report)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => Ok(self.csv()),
            Format::Table => Ok(self.table()),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in flatten(&Value::Object(self.results.clone()), "") {
            out.push_str(&csv_field(&k));
            out.push(',');
            out.push_str(&csv_field(&v));
            out.push('\n');
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!("{} (seed {}, v{})\n", self.experiment, self.seed, self.version);
        let params = flatten(&Value::Object(self.params.clone()), "");
        if !params.is_empty() {
            out.push_str("\nparameters\n");
            out.push_str(&two_columns(&params));
        }
        let mut scalars = Vec::new();
        let mut grids = Vec::new();
        for (k, v) in &self.results {
            match record_rows(v) {
                Some(grid) => grids.push((k.clone(), grid)),
                None => scalars.extend(flatten(v, k)),
            }
        }
        if !scalars.is_empty() {
            out.push_str("\nresults\n");
            out.push_str(&two_columns(&scalars));
        }
        for (name, (header, rows)) in grids {
            out.push_str(&format!("\n{name}\n"));
            out.push_str(&grid(&header, &rows));
        }
        out
    }
}

fn find_null(v: &Value, path: &str) -> Option<String> {
    match v {
        Value::Null => Some(path.to_string()),
        Value::Array(a) => a.iter().enumerate().find_map(|(i, x)| find_null(x, &format!("{path}.{i}"))),
        Value::Object(m) => m.iter().find_map(|(k, x)| find_null(x, &format!("{path}.{k}"))),
        _ => None,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Dotted paths to every scalar, in key order.
pub fn flatten(v: &Value, prefix: &str) -> Vec<(String, String)> {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().flat_map(|(k, x)| flatten(x, &join(k))).collect(),
        Value::Array(a) => a.iter().enumerate().flat_map(|(i, x)| flatten(x, &join(&i.to_string()))).collect(),
        other => vec![(prefix.to_string(), scalar(other))],
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// An array of flat objects sharing the first object's keys.
fn record_rows(v: &Value) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let arr = v.as_array()?;
    let first = arr.first()?.as_object()?;
    let header: Vec<String> = first.keys().cloned().collect();
    let mut rows = Vec::with_capacity(arr.len());
    for item in arr {
        let obj = item.as_object()?;
        if obj.keys().ne(header.iter()) {
            return None;
        }
        rows.push(
            header
                .iter()
                .map(|k| match &obj[k] {
                    Value::Object(_) | Value::Array(_) => {
                        flatten(&obj[k], "").into_iter().map(|(p, x)| format!("{p}={x}")).collect::<Vec<_>>().join(" ")
                    }
                    x => scalar(x),
                })
                .collect(),
        );
    }
    Some((header, rows))
}

fn two_columns(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("  {k:<w$}  {v}\n")).collect()
}

fn grid(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let body: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("  {}\n", body.join("  ").trim_end())
    };
    let mut out = line(header);
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}
