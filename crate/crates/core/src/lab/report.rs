use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

use super::config::Config;

/// A hard check; the report fails if any assertion fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Assertion {
    /// `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value <= tolerance, value, tolerance, detail: format!("≤ {tolerance:e}") }
    }

    /// `value ≥ tolerance`.
    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value >= tolerance, value, tolerance, detail: format!("≥ {tolerance}") }
    }
}

/// A rectangular table, written to `tables/<name>.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl DataTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(c) = self.columns.iter().position(|x| x == name) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r[c].as_f64()).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Everything an experiment run produces. Serialization is deterministic:
/// no timestamps, ordered maps, sums accumulated in a fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    #[serde(rename = "L")]
    pub level: u8,
    pub exponents: Option<[f64; 3]>,
    pub operator: String,
    pub config: Config,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub summary: BTreeMap<String, f64>,
    pub tables: Vec<DataTable>,
}

impl Report {
    pub fn new(config: &Config, operator: impl Into<String>) -> Self {
        let exponents = config.exponents().ok().map(|e| [e.p, e.q, e.r]);
        Self {
            experiment: config.experiment.name().into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: config.seed,
            level: config.level,
            exponents,
            operator: operator.into(),
            config: config.clone(),
            passed: true,
            assertions: Vec::new(),
            summary: BTreeMap::new(),
            tables: Vec::new(),
        }
    }

    pub fn assert(&mut self, a: Assertion) {
        self.passed &= a.passed;
        self.assertions.push(a);
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.summary.insert(key.into(), value);
    }

    pub fn table(&self, name: &str) -> Option<&DataTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.json` and `tables/<name>.csv` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("tables"))?;
        fs::write(dir.join("report.json"), self.to_json()? + "\n")?;
        for t in &self.tables {
            t.write_csv(fs::File::create(dir.join("tables").join(format!("{}.csv", t.name)))?)?;
        }
        Ok(())
    }
}
