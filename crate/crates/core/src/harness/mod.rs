//! Experiment configuration, dispatch and report output.
//!
//! A run takes an [`ExperimentConfig`] (TOML file and/or command-line
//! overrides), executes one experiment, and yields a [`RunOutcome`] holding
//! the JSON report and, where the experiment has one, a CSV table.

mod config;
mod inputs;
mod report;
mod run;

pub use config::{ExperimentConfig, ExperimentKind, ReportFormat, Tolerances};
pub use inputs::{parse_channel, parse_model, parse_state};
pub use report::{emit_report, render_csv, render_json, Report};
pub use run::{run, RunOutcome};

use crate::error::Error;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    PropertyViolation = 1,
    Usage = 2,
    Capacity = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(err: &Error) -> Self {
        match err {
            Error::Capacity { .. } => Self::Capacity,
            _ => Self::Usage,
        }
    }
}
