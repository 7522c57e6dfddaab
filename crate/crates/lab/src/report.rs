//! Experiment reports: one CSV row per trial plus a JSON summary, written as
//! `<experiment_id>-<hash>.csv` / `.json` where the hash is taken over the
//! canonical JSON of the parameters.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{io_error, LabResult};
use crate::io::format_float;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn write_csv(&self, path: &Path) -> LabResult<()> {
        let mut writer = csv::Writer::from_path(path)?;
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush().map_err(io_error(path))?;
        Ok(())
    }
}

/// A failed invariant, tied to the row that broke it when there is one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub row: Option<usize>,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub parameters: Value,
    pub table: Table,
    pub summary: Value,
    pub failures: Vec<Failure>,
}

impl ExperimentReport {
    pub fn new(experiment_id: &str, parameters: Value, table: Table) -> Self {
        Self {
            experiment_id: experiment_id.to_owned(),
            parameters,
            table,
            summary: json!({}),
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, row: Option<usize>, check: &str, detail: String) {
        self.failures.push(Failure {
            row,
            check: check.to_owned(),
            detail,
        });
    }

    /// Records a failure unless `ok`.
    pub fn check(
        &mut self,
        ok: bool,
        row: Option<usize>,
        check: &str,
        detail: impl FnOnce() -> String,
    ) {
        if !ok {
            self.fail(row, check, detail());
        }
    }

    pub fn hash(&self) -> String {
        parameter_hash(&self.parameters)
    }

    pub fn file_stem(&self) -> String {
        format!("{}-{}", self.experiment_id, self.hash())
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "experiment_id": self.experiment_id,
            "parameters": self.parameters,
            "rows": self.table.rows.len(),
            "summary": self.summary,
            "passed": self.passed(),
            "failures": self.failures,
        })
    }

    /// Writes the CSV and JSON files into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> LabResult<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        let stem = self.file_stem();
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        self.table.write_csv(&csv_path)?;
        write_json(&json_path, &self.summary_json())?;
        Ok((csv_path, json_path))
    }

    /// Per-row failure listing for stderr.
    pub fn failure_listing(&self) -> Vec<String> {
        self.failures
            .iter()
            .map(|f| match f.row {
                Some(r) => format!(
                    "{} row {}: {}: {}",
                    self.experiment_id, r, f.check, f.detail
                ),
                None => format!("{}: {}: {}", self.experiment_id, f.check, f.detail),
            })
            .collect()
    }
}

/// First 16 hex digits of SHA-256 over the compact JSON encoding.
pub fn parameter_hash(parameters: &Value) -> String {
    let digest = Sha256::digest(parameters.to_string().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// A float as JSON, with non-finite values spelled out as strings.
pub fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_float(x))
    }
}

pub fn write_json(path: &Path, value: &Value) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_error(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_independent_of_key_order() {
        let a = json!({"p": [1.5, 2.0], "n": 4});
        let b = json!({"n": 4, "p": [1.5, 2.0]});
        assert_eq!(parameter_hash(&a), parameter_hash(&b));
        assert_ne!(
            parameter_hash(&a),
            parameter_hash(&json!({"n": 5, "p": [1.5, 2.0]}))
        );
        assert_eq!(parameter_hash(&a).len(), 16);
    }

    #[test]
    fn writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut table = Table::new(&["x", "label"]);
        table.push(vec![0.25.into(), "a,b".into()]);
        let mut report = ExperimentReport::new("demo", json!({"seed": 1}), table);
        report.fail(Some(0), "too big", "0.25 > 0.2".into());
        let (csv, json_path) = report.write(dir.path()).unwrap();
        assert_eq!(fs::read_to_string(csv).unwrap(), "x,label\n0.25,\"a,b\"\n");
        let summary: Value = serde_json::from_str(&fs::read_to_string(json_path).unwrap()).unwrap();
        assert_eq!(summary["passed"], json!(false));
        assert_eq!(
            report.failure_listing(),
            vec!["demo row 0: too big: 0.25 > 0.2"]
        );
    }
}
