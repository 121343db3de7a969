//! Deterministic artifact rendering.
//!
//! CSV files start with a `# adsorb <version> config-sha256=<hex>` comment
//! line followed by a column row; numbers are printed with 17 significant
//! digits in scientific notation. JSON files carry the same information
//! under a top-level `header` key.

use std::fs;
use std::path::{Path, PathBuf};

use adsorb_core::{DimensionlessParameters, WaveProfile};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliError;

pub const TOOL: &str = "adsorb";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
}

impl Header {
    pub fn new(config_sha256: String) -> Self {
        Self { tool: TOOL, version: VERSION, config_sha256 }
    }

    pub fn comment_line(&self) -> String {
        format!("# {} {} config-sha256={}", self.tool, self.version, self.config_sha256)
    }
}

/// 17 significant digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, header: &Header) -> String {
        let mut out = String::with_capacity(32 * self.columns.len() * (self.rows.len() + 2));
        out.push_str(&header.comment_line());
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, header: &Header) -> Value {
        let rows: Vec<Vec<Value>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| if v.is_finite() { json!(v) } else { Value::Null }).collect())
            .collect();
        json!({ "header": header, "columns": self.columns, "rows": rows })
    }
}

/// A rendered file, not yet written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn table(stem: &str, table: &Table, header: &Header, format: Format) -> Self {
        match format {
            Format::Csv => Self { name: format!("{stem}.csv"), contents: table.to_csv(header) },
            Format::Json => Self::json(stem, &table.to_json(header)),
        }
    }

    pub fn json(stem: &str, value: &Value) -> Self {
        let mut contents = serde_json::to_string_pretty(value).expect("JSON values serialize");
        contents.push('\n');
        Self { name: format!("{stem}.json"), contents }
    }
}

/// Metadata document: `header` plus the given fields.
pub fn metadata(header: &Header, mut body: Value) -> Value {
    body["header"] = json!(header);
    body
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            fs::write(&path, &a.contents).map_err(|e| CliError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// Parses a table written by [`Table::to_csv`]: the comment line is skipped,
/// the column row is checked, and every field must parse as a float.
pub fn read_csv(text: &str, columns: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| CliError::Config("empty table".into()))?;
    let found: Vec<&str> = head.split(',').collect();
    if found != columns {
        return Err(CliError::Config(format!("expected columns {columns:?}, found {found:?}")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| CliError::Config(format!("row {}: {e}", i + 1)))?;
            if row.len() != columns.len() {
                return Err(CliError::Config(format!("row {} has {} fields", i + 1, row.len())));
            }
            Ok(row)
        })
        .collect()
}

/// Rebuilds a normalized profile from a wave CSV (columns eta, F, G).
pub fn read_wave_csv(text: &str, params: &DimensionlessParameters) -> Result<WaveProfile, CliError> {
    let rows = read_csv(text, &["eta", "F", "G"])?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    Ok(WaveProfile::from_columns(col(0), col(1), col(2), params, true)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_float_format() {
        assert_eq!(fmt_float(1.25), "1.2500000000000000e0");
        assert_eq!(fmt_float(-3.0e-7), "-2.9999999999999999e-7");
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let header = Header::new("ab".repeat(32));
        let mut t = Table::new(vec!["x", "y"]);
        t.push(vec![1.0, 1.0 / 3.0]);
        t.push(vec![2.0, f64::NAN]);
        let csv = t.to_csv(&header);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), format!("# adsorb {VERSION} config-sha256={}", "ab".repeat(32)));
        assert_eq!(lines.next().unwrap(), "x,y");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
        let rows = read_csv(&csv, &["x", "y"]).unwrap();
        assert_eq!(rows[0], vec![1.0, 1.0 / 3.0]);
        assert!(rows[1][1].is_nan());
        assert!(read_csv(&csv, &["x", "z"]).is_err());
    }

    #[test]
    fn json_tables_null_non_finite_values() {
        let header = Header::new(String::new());
        let mut t = Table::new(vec!["a"]);
        t.push(vec![f64::NAN]);
        let v = t.to_json(&header);
        assert_eq!(v["rows"][0][0], Value::Null);
        assert_eq!(v["header"]["tool"], "adsorb");
    }
}
