//! Check records and report files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Version of the JSON and CSV report layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A reported value with nothing asserted about it.
    Info,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// One line of a report. A check passes when `value <= tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub paper_ref: String,
    /// `None` when the value could not be computed or is not finite.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(id: impl Into<String>, paper_ref: &str, value: f64, tolerance: f64) -> Self {
        let ok = value.is_finite() && value <= tolerance;
        Check {
            id: id.into(),
            paper_ref: paper_ref.to_string(),
            value: value.is_finite().then_some(value),
            tolerance: Some(tolerance),
            status: if ok { Status::Pass } else { Status::Fail },
            note: None,
        }
    }

    /// A value with a tolerance whose verdict was decided elsewhere, for example point by point.
    pub fn judged(
        id: impl Into<String>,
        paper_ref: &str,
        value: f64,
        tolerance: f64,
        ok: bool,
    ) -> Self {
        let mut c = Check::at_most(id, paper_ref, value, tolerance);
        c.status = if ok && value.is_finite() {
            Status::Pass
        } else {
            Status::Fail
        };
        c
    }

    pub fn info(id: impl Into<String>, paper_ref: &str, value: f64) -> Self {
        Check {
            id: id.into(),
            paper_ref: paper_ref.to_string(),
            value: value.is_finite().then_some(value),
            tolerance: None,
            status: Status::Info,
            note: None,
        }
    }

    pub fn failed(id: impl Into<String>, paper_ref: &str, reason: impl ToString) -> Self {
        Check {
            id: id.into(),
            paper_ref: paper_ref.to_string(),
            value: None,
            tolerance: None,
            status: Status::Fail,
            note: Some(reason.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Everything a run writes to disk. Wall time is printed, not stored, so that
/// identical runs give identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub workers: usize,
    pub config: serde_json::Value,
    pub summary: Summary,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, config: serde_json::Value, checks: Vec<Check>) -> Self {
        let failed = checks.iter().filter(|c| !c.passed()).count();
        SuiteReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            seed,
            workers: 1,
            config,
            summary: Summary {
                total: checks.len(),
                passed: checks.len() - failed,
                failed,
            },
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn to_json(report: &SuiteReport) -> Result<String, CliError> {
    let mut s =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(report: &SuiteReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Format(e.to_string());
    w.write_record(["id", "paper_ref", "value", "tolerance", "status"])
        .map_err(fail)?;
    for c in &report.checks {
        w.write_record([
            c.id.as_str(),
            &c.paper_ref,
            &fmt_opt(c.value),
            &fmt_opt(c.tolerance),
            c.status.as_str(),
        ])
        .map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Format(e.to_string()))
}

/// Writes the report, creating parent directories as needed.
pub fn emit_report(report: &SuiteReport, path: &Path, format: Format) -> Result<(), CliError> {
    let body = match format {
        Format::Json => to_json(report)?,
        Format::Csv => to_csv(report)?,
    };
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(body.as_bytes()).map_err(io)
}

/// `dir/<suite>.<ext>`.
pub fn default_path(dir: &Path, suite: &str, format: Format) -> PathBuf {
    dir.join(format!("{suite}.{}", format.extension()))
}
