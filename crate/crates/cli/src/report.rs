//! Report assembly and CSV/JSON output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Column layout shared by every tail table.
pub const TAIL_COLUMNS: [&str; 5] = ["t", "empirical", "stderr", "bound_raw", "bound_clamped"];

/// A numeric table; `None` cells are written empty in CSV and `null` in JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match table {}", self.name);
        self.rows.push(row);
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push(row.iter().copied().map(Some).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(format_cell).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-tripping decimal; infinities and NaN spelled out.
fn format_cell(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let mut s = String::new();
        write!(s, "{x:?}").expect("write to string");
        s
    }
}

/// A pass/fail outcome backed by the named table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub table: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub threads: usize,
    pub runtime_seconds: f64,
    pub version: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub name: String,
    pub kind: String,
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    /// Smallest constants that make each bound dominate the estimate.
    #[serde(rename = "fitted_K")]
    pub fitted_k: BTreeMap<String, f64>,
    /// Named scalar results (slopes, exact moments, ...).
    pub values: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub metadata: Metadata,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            name: config.name.clone(),
            kind: config.kind().to_string(),
            config: config.clone(),
            tables: Vec::new(),
            fitted_k: BTreeMap::new(),
            values: BTreeMap::new(),
            verdicts: Vec::new(),
            passed: true,
            metadata: Metadata {
                threads: rayon::current_num_threads(),
                runtime_seconds: 0.0,
                version: env!("CARGO_PKG_VERSION"),
            },
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn add_table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn add_verdict(&mut self, name: impl Into<String>, passed: bool, table: &str, detail: impl Into<String>) {
        self.passed &= passed;
        self.verdicts.push(Verdict {
            name: name.into(),
            passed,
            table: table.to_string(),
            detail: detail.into(),
        });
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rejects reports with nothing to show or with a verdict that points at
    /// a missing table.
    pub fn check_complete(&self) -> Result<()> {
        if self.tables.is_empty() || self.tables.iter().all(|t| t.rows.is_empty()) {
            return Err(CliError::EmptyReport("table rows"));
        }
        if self.verdicts.is_empty() {
            return Err(CliError::EmptyReport("verdicts"));
        }
        if let Some(v) = self.verdicts.iter().find(|v| self.table(&v.table).is_none()) {
            return Err(CliError::Config {
                path: format!("verdicts.{}", v.name),
                message: format!("refers to missing table `{}`", v.table),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes `<table>.csv` per table and `summary.json` into `dir`, returning
/// the paths written.
pub fn emit_report(report: &Report, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>> {
    report.check_complete()?;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    if formats.contains(&Format::Csv) {
        for t in &report.tables {
            let path = dir.join(format!("{}.csv", t.name));
            std::fs::write(&path, t.to_csv()).map_err(io(&path))?;
            written.push(path);
        }
    }
    if formats.contains(&Format::Json) {
        let path = dir.join("summary.json");
        std::fs::write(&path, report.summary_json()).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
