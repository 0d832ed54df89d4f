//! Tabular experiment reports with per-row tolerances and verdicts.
//!
//! Reports serialize to CSV (with a machine-readable header comment naming
//! the columns) or JSON. Bodies are deterministic functions of the rows —
//! wall-clock time or anything else volatile never enters them — so repeated
//! runs of a seeded experiment are byte-identical at any worker count.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Informational row, excluded from the exit status.
    Info,
}

impl Verdict {
    pub fn from_bound(value: f64, tolerance: f64) -> Self {
        if value.is_finite() && value <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Info => "info",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub section: String,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
}

impl ReportRow {
    pub fn info(section: &str, label: &str, estimate: f64) -> Self {
        Self {
            section: section.into(),
            label: label.into(),
            n: None,
            estimate,
            stderr: None,
            tolerance: None,
            verdict: Verdict::Info,
        }
    }

    /// A checked row: pass iff `estimate <= tolerance`.
    pub fn bounded(section: &str, label: &str, estimate: f64, tolerance: f64) -> Self {
        Self {
            section: section.into(),
            label: label.into(),
            n: None,
            estimate,
            stderr: None,
            tolerance: Some(tolerance),
            verdict: Verdict::from_bound(estimate, tolerance),
        }
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // Collapse -0 so byte-identity cannot depend on a sign of zero.
        "0".to_string()
    } else {
        format!("{x:.12e}")
    }
}

impl ExperimentReport {
    pub fn new(command: &str, seed: u64) -> Self {
        Self { command: command.into(), seed, rows: Vec::new() }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    /// CSV body. The first line is a machine-readable comment documenting
    /// the columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# columns: command,seed,section,label,n,estimate,stderr,tolerance,verdict\n");
        for r in &self.rows {
            let n = r.n.map(|v| v.to_string()).unwrap_or_default();
            let se = r.stderr.map(fmt_float).unwrap_or_default();
            let tol = r.tolerance.map(fmt_float).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.command,
                self.seed,
                r.section,
                r.label,
                n,
                fmt_float(r.estimate),
                se,
                tol,
                r.verdict.as_str()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization") + "\n"
    }
}
