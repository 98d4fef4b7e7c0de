//! CSV row types and reading/writing helpers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// One `Δ_θ(ℓ)` search result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta80Row {
    pub ell: u32,
    pub variant: String,
    pub n: u32,
    pub k: u32,
    pub t: u32,
    pub trials: u32,
    pub threshold: f64,
    pub delta80: f64,
    pub stderr: f64,
    pub replicates: u32,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub longest_chain: u32,
    pub throughput: f64,
    pub shape_code: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub shape_code: String,
    pub count: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallsRow {
    pub t: u32,
    pub ell: u32,
    pub run: u32,
    pub max_load: u32,
    #[serde(rename = "bound_C6")]
    pub bound_c6: f64,
}

/// Serialise `rows` with a header line. The file is written in one go, so
/// a failure leaves nothing behind.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| HarnessError::Data { path: path.display().to_string(), message: e.to_string() })?;
    }
    let bytes = w.into_inner().expect("in-memory writer");
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => HarnessError::io(path, source),
        kind => HarnessError::Data { path: path.display().to_string(), message: format!("{kind:?}") },
    }
}

/// A CSV held as strings, for consumers that only know column names.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: String,
    pub headers: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let headers = r.headers().map_err(|e| csv_error(path, e))?.iter().map(String::from).collect();
        let rows = r.records().collect::<Result<Vec<_>, _>>().map_err(|e| csv_error(path, e))?;
        let table = Table { path: path.display().to_string(), headers, rows };
        if table.rows.is_empty() {
            return Err(table.error("no data rows"));
        }
        Ok(table)
    }

    fn error(&self, message: impl Into<String>) -> HarnessError {
        HarnessError::Data { path: self.path.clone(), message: message.into() }
    }

    pub fn has(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| self.error(format!("missing column `{name}` (found: {})", self.headers.join(","))))
    }

    pub fn number(&self, row: usize, col: usize) -> Result<f64> {
        let cell = self.rows[row].get(col).unwrap_or("");
        cell.trim().parse().map_err(|_| {
            self.error(format!("row {}: column `{}` holds {cell:?}, not a number", row + 2, self.headers[col]))
        })
    }

    pub fn text(&self, row: usize, col: usize) -> &str {
        self.rows[row].get(col).unwrap_or("")
    }
}
