//! Tabular output in CSV or JSON.
//!
//! Floats are written in Rust's shortest round-trip form so identical runs
//! produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_f64(*v),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Cell::Num(v) => num(*v),
                            Cell::Text(s) => Value::String(s.clone()),
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// JSON number, with non-finite values as strings.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(fmt_f64(v)))
}

/// A file to be written under the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

impl OutputFile {
    /// `stem.csv` or `stem.json` depending on the format.
    pub fn table(stem: &str, table: &Table, format: Format) -> Self {
        match format {
            Format::Csv => Self { name: format!("{stem}.csv"), contents: table.to_csv() },
            Format::Json => Self::json(&format!("{stem}.json"), &table.to_json()),
        }
    }

    pub fn json(name: &str, value: &Value) -> Self {
        let mut contents = serde_json::to_string_pretty(value).expect("JSON values serialize");
        contents.push('\n');
        Self { name: name.to_string(), contents }
    }
}

pub fn write_all(dir: &Path, files: &[OutputFile]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_floats() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1.into(), (1.0 / 3.0).into()]);
        t.push(vec![1e-300.into(), "x".into()]);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next(), Some("a,b"));
        let second: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(second[0], "0.1");
        assert_eq!(second[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(csv.lines().nth(2), Some("1e-300,x"));
    }

    #[test]
    fn json_table_shape() {
        let mut t = Table::new(&["tau"]);
        t.push(vec![f64::INFINITY.into()]);
        let v = t.to_json();
        assert_eq!(v["columns"][0], "tau");
        assert_eq!(v["rows"][0][0], "inf");
    }
}
