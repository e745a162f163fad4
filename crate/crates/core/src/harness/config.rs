use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Nosignal,
    Lightcone,
    Chsh,
    Detect,
    Evolve,
    Validate,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nosignal => "nosignal",
            Self::Lightcone => "lightcone",
            Self::Chsh => "chsh",
            Self::Detect => "detect",
            Self::Evolve => "evolve",
            Self::Validate => "validate",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
            .map_err(|_| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (json or csv)"))),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

/// Pass/fail thresholds; every field must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Reduced-state and conservation checks.
    pub eq: f64,
    /// Out-of-cone δ in light-cone sweeps.
    pub cone: f64,
    /// CHSH bounds.
    pub chsh: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq: tol::EQ,
            cone: 1e-12,
            chsh: 1e-9,
        }
    }
}

/// Everything needed to run one experiment. Unset fields take
/// per-experiment defaults, which are echoed in the report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub qubits: Option<usize>,
    pub sites: Option<usize>,
    pub layers: Option<usize>,
    pub dt: Option<f64>,
    pub time: Option<f64>,
    pub model: Option<String>,
    pub state: Option<String>,
    pub channel: Option<String>,
    pub angles: Option<[f64; 4]>,
    pub disturb: Option<usize>,
    pub tolerances: Tolerances,
    /// Never echoed: results do not depend on it.
    #[serde(skip_serializing)]
    pub execution: Execution,
    pub out: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

/// Seed used, and recorded, when none is given.
pub const DEFAULT_SEED: u64 = 0;

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            experiment: Some(kind),
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fields set in `over` replace those in `self`. Tolerances and
    /// execution mode are replaced when they differ from the defaults.
    pub fn merged(mut self, over: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(experiment, seed, trials, qubits, sites, layers, dt, time, model, state, channel, angles, disturb, out, format);
        if over.tolerances != Tolerances::default() {
            self.tolerances = over.tolerances;
        }
        if over.execution != Execution::default() {
            self.execution = over.execution;
        }
        self
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.experiment
            .ok_or_else(|| Error::Config("no experiment selected".into()))
    }

    pub fn validate(&self) -> Result<()> {
        self.kind()?;
        let t = &self.tolerances;
        for (name, v) in [("eq", t.eq), ("cone", t.cone), ("chsh", t.chsh)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if let Some(t) = self.time {
            if !t.is_finite() {
                return Err(Error::Config(format!("time must be finite, got {t}")));
            }
        }
        Ok(())
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}
