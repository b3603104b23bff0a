//! CSV/JSON rendering and the reproducibility sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::job::Table;

pub const TOOL_NAME: &str = "biharmonic";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seventeen significant digits; masked cells are empty.
pub fn format_value(value: Option<f64>) -> String {
    match value {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

pub fn render_csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn render_json(table: &Table) -> String {
    let rows: Vec<Vec<Option<f64>>> = table
        .rows
        .iter()
        .map(|row| row.iter().map(|v| v.filter(|x| x.is_finite())).collect())
        .collect();
    let doc = serde_json::json!({ "columns": table.columns, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
    text.push('\n');
    text
}

pub fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => render_json(table),
    }
}

/// Written next to every output; `--config` accepts it to repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub tolerances: Value,
    pub summary: Value,
}

impl Sidecar {
    pub fn new(config: RunConfig, tolerances: Value, summary: Value) -> Self {
        Self {
            tool: TOOL_NAME.to_owned(),
            version: TOOL_VERSION.to_owned(),
            config,
            tolerances,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("sidecar serializes");
        text.push('\n');
        text
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let text = format_value(Some(x));
        assert_eq!(text, "3.0000000000000004e-1");
        assert_eq!(text.parse::<f64>().unwrap(), x);
        assert_eq!(format_value(None), "");
        assert_eq!(format_value(Some(-2.0)), "-2.0000000000000000e0");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let table = Table {
            columns: vec!["zeta", "S", "S_ac"],
            rows: vec![vec![Some(0.5), Some(1.0), None]],
        };
        assert_eq!(render_csv(&table), "zeta,S,S_ac\n5.0000000000000000e-1,1.0000000000000000e0,\n");
        let json: Value = serde_json::from_str(&render_json(&table)).unwrap();
        assert_eq!(json["rows"][0][2], Value::Null);
    }

    #[test]
    fn sidecar_sits_next_to_output() {
        assert_eq!(sidecar_path(Path::new("out/map.csv")), PathBuf::from("out/map.csv.json"));
    }
}
