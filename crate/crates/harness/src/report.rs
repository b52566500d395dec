//! Experiment reports: named tables written as CSV with a leading
//! `# config_sha256=...` line, plus a JSON mirror with all metadata.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
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
            // Shortest round-trip form, switching to exponents at the extremes.
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
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
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::report::Cell::from($x)),*] };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric column values.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let i = self.column(name).unwrap_or_else(|| panic!("no column {name} in {}", self.name));
        self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// Whether the theorem preconditions hold for the run's parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    InTheorem,
    OutOfTheorem,
}

/// A pass/fail comparison of an empirical value against its reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: ExperimentKind,
    pub config_sha256: String,
    pub regime: Regime,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub config: ExperimentConfig,
}

impl Report {
    pub fn new(config: &ExperimentConfig, warnings: Vec<String>) -> Self {
        let regime = if warnings.is_empty() { Regime::InTheorem } else { Regime::OutOfTheorem };
        Report {
            experiment: config.experiment,
            config_sha256: config.sha256(),
            regime,
            warnings,
            checks: Vec::new(),
            tables: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn csv(&self, table: &Table) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&table.header).expect("in-memory write");
        for r in &table.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
        format!("# config_sha256={}\n# regime={}\n{body}", self.config_sha256, self.regime_name())
    }

    fn regime_name(&self) -> &'static str {
        match self.regime {
            Regime::InTheorem => "in-theorem",
            Regime::OutOfTheorem => "out-of-theorem",
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<experiment>_<table>.csv` for every table and
    /// `<experiment>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{}_{}.csv", self.experiment.name(), t.name));
            fs::write(&path, self.csv(t))?;
            out.push(path);
        }
        let path = dir.join(format!("{}.json", self.experiment.name()));
        fs::write(&path, self.json())?;
        out.push(path);
        Ok(out)
    }
}
