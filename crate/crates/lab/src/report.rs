//! Report formatting, error-to-exit-code mapping, and deterministic CSV
//! output.
//!
//! Exit codes: `0` success, `1` a checked inequality or certificate failed,
//! `2` configuration error (bad flags, files, or hypotheses), `3` a resource
//! cap or search budget was exceeded.
//!
//! Reports are byte-identical across runs with the same inputs, except for
//! the optional timestamp header line, which `--no-timestamp` suppresses.

use std::fmt::Write as _;

use spectral_core::CoreError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

/// Lab-level error: carries the message and the exit code it maps to.
#[derive(Debug)]
pub struct LabError {
    pub message: String,
    pub exit: u8,
}

impl LabError {
    pub fn config(message: String) -> Self {
        LabError {
            message,
            exit: EXIT_CONFIG,
        }
    }

    pub fn violation(message: String) -> Self {
        LabError {
            message,
            exit: EXIT_VIOLATION,
        }
    }

    pub fn resource(message: String) -> Self {
        LabError {
            message,
            exit: EXIT_RESOURCE,
        }
    }

    pub fn from_core(e: CoreError) -> Self {
        LabError {
            exit: exit_for_core(&e),
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for LabError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// Maps library errors onto the exit-code contract. Falsified internal
/// invariants are violations; budget and search exhaustion are resource
/// failures; everything else is a configuration / hypothesis problem.
pub fn exit_for_core(e: &CoreError) -> u8 {
    match e {
        CoreError::Internal(_) => EXIT_VIOLATION,
        CoreError::TooLarge { .. }
        | CoreError::OrderTooLarge(_, _)
        | CoreError::Exhausted { .. }
        | CoreError::NoRegularDilate { .. }
        | CoreError::Inconclusive(_)
        | CoreError::StepFailure(_) => EXIT_RESOURCE,
        _ => EXIT_CONFIG,
    }
}

/// Formats a float with 12 significant digits, deterministically.
/// Integers that fit exactly are printed without an exponent.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.fract() == 0.0 && x.abs() < 1e12 {
        return format!("{}", x as i64);
    }
    format!("{x:.11e}")
}

/// One CSV row of a verification suite: a named check inside a trial.
#[derive(Clone, Debug)]
pub struct TrialRow {
    pub trial: u64,
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub note: String,
}

impl TrialRow {
    pub fn new(trial: u64, case: impl Into<String>, lhs: f64, rhs: f64, holds: bool) -> Self {
        TrialRow {
            trial,
            case: case.into(),
            lhs,
            rhs,
            holds,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Result of one suite: rows (sorted by trial index) plus pass/fail.
#[derive(Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub rows: Vec<TrialRow>,
    pub trials: usize,
}

impl SuiteReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Accumulates a deterministic text report with an optional timestamp line.
pub struct ReportSink {
    buf: String,
    timestamp: bool,
}

impl ReportSink {
    pub fn new(timestamp: bool) -> Self {
        let mut sink = ReportSink {
            buf: String::new(),
            timestamp,
        };
        if sink.timestamp {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(sink.buf, "# timestamp: {now}");
        }
        sink
    }

    pub fn line(&mut self, text: &str) {
        let _ = writeln!(self.buf, "{text}");
    }

    /// Appends one suite as CSV rows under a per-suite header.
    pub fn suite_csv(&mut self, report: &SuiteReport) {
        self.line(&format!(
            "# suite: {} trials: {} violations: {}",
            report.name,
            report.trials,
            report.violations()
        ));
        self.line("suite,trial,case,lhs,rhs,slack,holds,note");
        for row in &report.rows {
            let slack = row.rhs - row.lhs;
            self.line(&format!(
                "{},{},{},{},{},{},{},{}",
                report.name,
                row.trial,
                row.case,
                fmt_sig(row.lhs),
                fmt_sig(row.rhs),
                fmt_sig(slack),
                row.holds,
                row.note
            ));
        }
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
