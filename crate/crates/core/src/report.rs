//! Run reports and their JSON/CSV encodings.
//!
//! Floats are written in shortest round-trip form, so a report parsed back
//! from JSON compares equal to the one that was written. The same config
//! and seed always produce byte-identical output.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use crate::conservation::{BranchOffsets, MeterCheck, Table1};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::state::{Distribution, SubsystemLabel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub outcome: i64,
    pub probability: f64,
    pub deviation: f64,
    pub post_distribution: Distribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
}

/// Grand-preparer chain distributions, simulated and in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Block {
    pub measured_value: i64,
    pub outcome_probability: f64,
    pub simulated: Table1,
    pub oracle: Table1,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub mode: String,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub rng: Option<String>,
    pub config: ScenarioConfig,
    pub measured: SubsystemLabel,
    pub scope: Vec<SubsystemLabel>,
    pub baseline: Distribution,
    pub outcomes: Vec<OutcomeRow>,
    pub max_deviation: f64,
    pub conserved: bool,
    pub expect_conserved: bool,
    pub table1: Option<Table1Block>,
    /// Frame-factorization residual per two-party shift-prepare step.
    pub residuals: BTreeMap<String, f64>,
    /// Entanglement entropy (bits) of each subsystem with the rest, after
    /// the chain and before the measurement.
    pub entropies: BTreeMap<String, f64>,
    pub branch_offsets: BTreeMap<String, BranchOffsets>,
    pub meter_checks: BTreeMap<String, MeterCheck>,
    /// Checked invariants that failed. Non-empty means exit status 2.
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn has_violations(&self) -> bool {
        !self.violations.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per outcome: `outcome,probability,deviation`, plus
    /// `count,frequency` in sample mode.
    pub fn to_csv(&self) -> Result<String> {
        let sampled = self.mode == "sample";
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["outcome", "probability", "deviation"];
        if sampled {
            header.extend(["count", "frequency"]);
        }
        w.write_record(&header)?;
        for row in &self.outcomes {
            let mut rec = vec![row.outcome.to_string(), row.probability.to_string(), row.deviation.to_string()];
            if sampled {
                rec.push(row.count.unwrap_or(0).to_string());
                rec.push(row.frequency.unwrap_or(0.0).to_string());
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn write_to<W: Write>(&self, format: Format, mut out: W) -> Result<()> {
        out.write_all(self.render(format)?.as_bytes())?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?} (json or csv)"))),
        }
    }
}
