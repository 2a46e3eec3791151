use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// A CSV table with a fixed header.
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Self {
            name: name.into(),
            header,
            rows,
        }
    }

    /// Re-reads CSV produced by a library writer.
    pub fn from_csv(name: &str, bytes: &[u8]) -> Self {
        let mut r = csv::Reader::from_reader(bytes);
        let header = r.headers().map(|h| h.iter().map(String::from).collect()).unwrap_or_default();
        let rows = r
            .records()
            .filter_map(|rec| rec.ok())
            .map(|rec| rec.iter().map(String::from).collect())
            .collect();
        Self::new(name, header, rows)
    }

    fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(path)
    }
}

#[derive(Serialize)]
struct Report<'a, C: Serialize> {
    operation: &'a str,
    config: &'a C,
    result: &'a serde_json::Value,
    tables: Vec<&'a str>,
}

/// Writes `report.json` and one CSV per table into `dir`.
pub fn write_all<C: Serialize>(
    dir: &Path,
    operation: &str,
    config: &C,
    result: &serde_json::Value,
    tables: &[Table],
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for t in tables {
        t.write(dir)?;
    }
    let report = Report {
        operation,
        config,
        result,
        tables: tables.iter().map(|t| t.name.as_str()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)
}
