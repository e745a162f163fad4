use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ReportFormat};
use super::run::RunOutcome;
use crate::error::{Error, Result};

/// Top-level JSON document written for every run.
///
/// `generated_at` is the only field that varies between runs with the same
/// config and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub seed_defaulted: bool,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub failures: Vec<String>,
    pub result: serde_json::Value,
    /// Column names of the CSV table, when the experiment has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_columns: Option<Vec<String>>,
    pub generated_at: u64,
}

pub(crate) fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn render_json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Serializes `rows` with a header line; an empty slice gives the header only.
pub fn render_csv<T: Serialize>(columns: &[&str], rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

/// Renders `outcome` in `format` and writes it to `path`, or to stdout when
/// `path` is `None`.
pub fn emit_report(outcome: &RunOutcome, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    let body = outcome.render(format)?;
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
            }
            std::fs::write(p, &body).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
