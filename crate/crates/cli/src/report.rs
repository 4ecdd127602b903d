//! Run reports and their CSV tables.

use std::io::Write;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::CliError;

/// One gap compared with its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub gap: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, gap: f64, tol: f64) -> Self {
        // A NaN gap never passes.
        Self { name: name.into(), gap, tol, pass: gap <= tol }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub toolkit_version: String,
    pub inputs: RunConfig,
    pub outputs: Value,
    pub checks: Vec<Check>,
    pub diagnostics: Value,
    pub wall_time_s: f64,
    pub pass: bool,
}

impl RunReport {
    pub fn new(
        command: &str,
        inputs: RunConfig,
        outputs: Value,
        checks: Vec<Check>,
        diagnostics: Value,
        elapsed: Duration,
    ) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            toolkit_version: env!("CARGO_PKG_VERSION").into(),
            inputs,
            outputs,
            checks,
            diagnostics,
            wall_time_s: elapsed.as_secs_f64(),
            pass,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Rows of plain values under a header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Config(format!("cannot write output: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Config(format!("cannot write output: {e}")))
    }
}

/// Shortest round-tripping text of a float.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
