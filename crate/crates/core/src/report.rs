//! Report envelopes and CSV/JSON emission shared by the CLI and the
//! acceptance harness.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::counting_harness::CountReport;
use crate::{Result, SCHEMA_VERSION};

/// Wrapper written around every report: the command that produced it and
/// its seed, with no wall-clock fields, so equal inputs give equal bytes.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub seed: Option<u64>,
    pub passed: bool,
    pub report: &'a T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command: &'a str, seed: Option<u64>, passed: bool, report: &'a T) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, command, seed, passed, report }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

/// `R,raw_count,quotient_count` with a header row and LF line endings.
pub fn counts_csv(report: &CountReport) -> String {
    let mut out = String::from("R,raw_count,quotient_count\n");
    for ((r, raw), q) in report.radii.iter().zip(&report.raw_counts).zip(&report.quotient_counts) {
        writeln!(out, "{r},{raw},{q}").expect("writing to a String");
    }
    out
}

/// One line of the acceptance summary.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {:>7.2}s / {:>4.0}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}
