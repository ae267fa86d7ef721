//! Report assembly and the on-disk artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use korovkin_lab::engine::write_csv_table;
use korovkin_lab::Tolerances;
use serde_json::{json, Map, Value};

use crate::error::CliError;

/// A CSV table written as `<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

/// One declared expectation and what the run observed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationCheck {
    pub name: String,
    pub expected: Value,
    pub observed: Value,
    pub held: bool,
}

impl ExpectationCheck {
    pub fn new(name: &str, expected: impl serde::Serialize, observed: impl serde::Serialize, held: bool) -> Self {
        Self {
            name: name.to_string(),
            expected: to_value(expected),
            observed: to_value(observed),
            held,
        }
    }

    /// Holds iff `observed == expected`.
    pub fn equal<T: serde::Serialize + PartialEq>(name: &str, expected: T, observed: T) -> Self {
        let held = expected == observed;
        Self::new(name, expected, observed, held)
    }
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Everything a run produced. The first table is the evidence table.
#[derive(Clone, Debug)]
pub struct Results {
    pub config: Value,
    pub tolerances: Tolerances,
    pub summary: Map<String, Value>,
    pub classifications: BTreeMap<String, String>,
    pub limsup_estimates: BTreeMap<String, f64>,
    pub tables: Vec<Table>,
    pub expectations: Vec<ExpectationCheck>,
}

impl Results {
    pub fn new(config: Value, tolerances: Tolerances, evidence_header: &[&str]) -> Self {
        Self {
            config,
            tolerances,
            summary: Map::new(),
            classifications: BTreeMap::new(),
            limsup_estimates: BTreeMap::new(),
            tables: vec![Table::new("evidence", evidence_header)],
            expectations: Vec::new(),
        }
    }

    pub fn evidence(&mut self) -> &mut Table {
        &mut self.tables[0]
    }

    pub fn note(&mut self, key: &str, value: impl serde::Serialize) {
        self.summary.insert(key.to_string(), to_value(value));
    }

    pub fn pass(&self) -> bool {
        self.expectations.iter().all(|e| e.held)
    }

    pub fn to_json(&self) -> Value {
        let expectations: Map<String, Value> = self
            .expectations
            .iter()
            .map(|e| {
                (
                    e.name.clone(),
                    json!({"expected": e.expected, "observed": e.observed, "held": e.held}),
                )
            })
            .collect();
        let mut summary = self.summary.clone();
        summary.insert("expectations".into(), Value::Object(expectations));
        json!({
            "classifications": self.classifications,
            "config": self.config,
            "limsup_estimates": self.limsup_estimates,
            "pass": self.pass(),
            "summary": summary,
            "tolerances": self.tolerances,
        })
    }
}

/// Writes `report.json` and one CSV per table into `output_dir`, creating it
/// if needed. Returns whether every expectation held.
pub fn emit_report(results: &Results, output_dir: &Path) -> Result<bool, CliError> {
    fs::create_dir_all(output_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", output_dir.display())))?;
    for table in &results.tables {
        let path = output_dir.join(format!("{}.csv", table.name));
        let file = fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        write_csv_table(std::io::BufWriter::new(file), &table.header, table.rows.iter().cloned())?;
    }
    let mut text = serde_json::to_string_pretty(&results.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    let path = output_dir.join("report.json");
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(results.pass())
}
