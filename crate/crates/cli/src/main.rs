//! `sepalab` command-line driver.
//!
//! Exit codes: 0 pass, 1 property violation, 2 usage/config error,
//! 3 capacity exceeded.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sepalab::harness::{emit_report, run, ExitStatus, ExperimentConfig, ExperimentKind, Tolerances};
use sepalab::par::Execution;
use sepalab::Error;

#[derive(Parser, Debug)]
#[command(name = "sepalab", version, about = "Local statistics, light cones and signaling checks on finite quantum systems")]
struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for `<experiment>.<format>` reports when `--out` is not given.
    #[arg(long, global = true, env = "SEPALAB_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random (state, CPTP disturbance, bipartition) sweep.
    Nosignal(Flags),
    /// Disturbance propagation through a brickwork Trotter circuit.
    Lightcone(Flags),
    /// Exact CHSH value of a two-qubit state.
    Chsh(Flags),
    /// Search for states on which a map signals.
    Detect(Flags),
    /// Exact and Trotterized evolution with conservation checks.
    Evolve(Flags),
    /// Lint a state and/or channel.
    Validate(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Evolution time for `evolve`.
    #[arg(long)]
    time: Option<f64>,
    /// e.g. `ising:J=1,g=1`, `heisenberg:J=1`, or a JSON/TOML file.
    #[arg(long)]
    model: Option<String>,
    /// e.g. `bell:phi+`, `ghz`, `random:2`, or a state JSON file.
    #[arg(long)]
    state: Option<String>,
    /// Built-in id (`depolarizing:0.3`, `toy-collapse`, `x`, ...) or a JSON file.
    #[arg(long)]
    channel: Option<String>,
    /// `a0,a1,b0,b1` in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// Site the disturbance acts on.
    #[arg(long)]
    disturb: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` or `csv`.
    #[arg(long)]
    format: Option<String>,
    /// Run trials on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Override the state-equality tolerance.
    #[arg(long)]
    tol_eq: Option<f64>,
    /// Override the out-of-cone tolerance.
    #[arg(long)]
    tol_cone: Option<f64>,
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Flags) {
        match self {
            Command::Nosignal(f) => (ExperimentKind::Nosignal, f),
            Command::Lightcone(f) => (ExperimentKind::Lightcone, f),
            Command::Chsh(f) => (ExperimentKind::Chsh, f),
            Command::Detect(f) => (ExperimentKind::Detect, f),
            Command::Evolve(f) => (ExperimentKind::Evolve, f),
            Command::Validate(f) => (ExperimentKind::Validate, f),
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let (kind, f) = cli.command.split();
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if base.experiment.is_some_and(|named| named != kind) {
        return Err(Error::Config(format!("config file names a different experiment than `{kind}`")));
    }
    let mut tolerances = base.tolerances;
    if let Some(t) = f.tol_eq {
        tolerances.eq = t;
    }
    if let Some(t) = f.tol_cone {
        tolerances.cone = t;
    }
    let angles = f
        .angles
        .as_ref()
        .map(|v| <[f64; 4]>::try_from(v.as_slice()).map_err(|_| Error::Config("--angles takes four values".into())))
        .transpose()?;
    let over = ExperimentConfig {
        experiment: Some(kind),
        seed: f.seed,
        trials: f.trials,
        qubits: f.qubits,
        sites: f.sites,
        layers: f.layers,
        dt: f.dt,
        time: f.time,
        model: f.model.clone(),
        state: f.state.clone(),
        channel: f.channel.clone(),
        angles,
        disturb: f.disturb,
        tolerances: Tolerances::default(),
        execution: if f.sequential { Execution::Sequential } else { Execution::default() },
        out: f.out.clone(),
        format: f.format.as_deref().map(str::parse).transpose()?,
    };
    let mut cfg = base.merged(over);
    cfg.tolerances = tolerances;
    Ok(cfg)
}

fn report_error(err: &Error) -> i32 {
    let status = ExitStatus::for_error(err);
    let kind = match status {
        ExitStatus::Capacity => "capacity",
        _ => "usage",
    };
    eprintln!(
        "{}",
        serde_json::json!({ "status": "error", "kind": kind, "message": err.to_string() })
    );
    status.code()
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    let format = cfg.format.unwrap_or_default();
    let path = cfg.out.clone().or_else(|| {
        cli.out_dir
            .as_ref()
            .map(|dir| dir.join(format!("{}.{}", outcome.report.experiment, format.extension())))
    });
    if let Err(e) = emit_report(&outcome, format, path.as_deref()) {
        return report_error(&e);
    }
    if !outcome.passed() {
        eprintln!("{}", outcome.failure_summary());
    }
    outcome.exit_status().code()
}

fn main() {
    std::process::exit(real_main());
}
