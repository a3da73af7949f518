//! CSV tables and JSON metadata.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ScenarioConfig, Units};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    /// Floats carry 17 significant digits so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(u64::from(n))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    /// Seconds since the epoch from `SOURCE_DATE_EPOCH`; absent otherwise so
    /// repeated runs stay byte-identical.
    pub timestamp: Option<u64>,
    pub units: Units,
    pub config: ScenarioConfig,
    pub summary: serde_json::Value,
}

impl Metadata {
    pub fn new(subcommand: &'static str, config: &ScenarioConfig, summary: serde_json::Value) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            seed: config.quadrature.seed,
            timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()),
            units: config.units,
            config: config.clone(),
            summary,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub table: Table,
    pub meta: Metadata,
}

/// Where the metadata for a CSV written to `out` goes.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

impl ResultRecord {
    pub fn metadata_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(&self.meta)?;
        s.push('\n');
        Ok(s)
    }

    /// CSV to `out` (metadata alongside), or CSV to stdout and metadata to
    /// stderr.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let meta = self.metadata_json()?;
        match out {
            Some(path) => {
                let file = std::fs::File::create(path)?;
                self.table.write_csv(std::io::BufWriter::new(file))?;
                std::fs::write(metadata_path(path), meta)?;
            }
            None => {
                self.table.write_csv(std::io::stdout().lock())?;
                std::io::stderr().write_all(meta.as_bytes())?;
            }
        }
        Ok(())
    }
}
