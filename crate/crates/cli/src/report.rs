//! CSV tables and the JSON manifest written next to them.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

/// A CSV table with a fixed header. Cells are stored pre-formatted so floats
/// keep full round-trip precision in plain decimal.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize, P: Serialize> {
    pub command: &'a str,
    pub args: Vec<String>,
    pub config: &'a C,
    pub parameters: P,
    pub seed: u64,
    pub workers: usize,
    pub tool_version: &'static str,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<PathBuf>,
}

pub fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Writes `<stem>.csv` and `<stem>.manifest.json` under `dir`.
pub fn emit<C: Serialize, P: Serialize>(
    dir: &Path,
    stem: &str,
    table: &Table,
    mut manifest: Manifest<'_, C, P>,
) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    table.write(&csv_path)?;
    manifest.outputs.push(csv_path.clone());
    manifest.finished_at = timestamp(Utc::now());
    let json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    fs::write(dir.join(format!("{stem}.manifest.json")), json + "\n")?;
    Ok(csv_path)
}
