use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentKind, ReportFormat};
use super::inputs::{parse_channel, parse_model, parse_state, read};
use super::report::{now_secs, render_csv, render_json, Report};
use super::ExitStatus;
use crate::channel::{validate_channel, ChannelFile};
use crate::error::{Error, Result};
use crate::lab::{
    chsh_experiment, detect_signaling, lightcone_sweep, no_signaling_check_at, no_signaling_sweep, SweepConfig,
    OPTIMAL_ANGLES,
};
use crate::lattice::{build_trotter, evolve_von_neumann};
use crate::state::{validate_matrix, validate_state, StateFile};
use crate::tensor::{herm_expm, is_unitary, SiteSet};

/// Result of one run: the JSON report plus an optional CSV table.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub csv: Option<String>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed
    }

    pub fn exit_status(&self) -> ExitStatus {
        if self.passed() {
            ExitStatus::Pass
        } else {
            ExitStatus::PropertyViolation
        }
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => render_json(&self.report),
            ReportFormat::Csv => self.csv.clone().ok_or_else(|| {
                Error::Config(format!("experiment `{}` has no CSV table", self.report.experiment))
            }),
        }
    }

    /// `{"status", "experiment", "failures"}` for stderr on failure.
    pub fn failure_summary(&self) -> String {
        json!({
            "status": if self.passed() { "pass" } else { "fail" },
            "experiment": self.report.experiment,
            "failures": self.report.failures,
        })
        .to_string()
    }
}

struct Body {
    result: Value,
    failures: Vec<String>,
    csv: Option<(Vec<&'static str>, String)>,
}

/// Runs the configured experiment.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let kind = config.kind()?;
    let mut cfg = config.clone();
    let seed_defaulted = cfg.seed.is_none();
    cfg.seed = Some(cfg.seed_or_default());

    let body = match kind {
        ExperimentKind::Nosignal => nosignal(&mut cfg)?,
        ExperimentKind::Lightcone => lightcone(&mut cfg)?,
        ExperimentKind::Chsh => chsh(&mut cfg)?,
        ExperimentKind::Detect => detect(&mut cfg)?,
        ExperimentKind::Evolve => evolve(&mut cfg)?,
        ExperimentKind::Validate => validate(&mut cfg)?,
    };

    let (csv_columns, csv) = match body.csv {
        Some((cols, text)) => (Some(cols.iter().map(|c| c.to_string()).collect()), Some(text)),
        None => (None, None),
    };
    Ok(RunOutcome {
        report: Report {
            tool: "sepalab".into(),
            version: crate::VERSION.into(),
            experiment: kind.to_string(),
            seed: cfg.seed_or_default(),
            seed_defaulted,
            passed: body.failures.is_empty(),
            failures: body.failures,
            result: body.result,
            csv_columns,
            config: cfg,
            generated_at: now_secs(),
        },
        csv,
    })
}

fn nosignal(cfg: &mut ExperimentConfig) -> Result<Body> {
    let trials = *cfg.trials.get_or_insert(500);
    let sweep_cfg = SweepConfig {
        trials,
        seed: cfg.seed_or_default(),
        qubits: cfg.qubits,
        tolerance: cfg.tolerances.eq,
        execution: cfg.execution,
    };
    let sweep = no_signaling_sweep(&sweep_cfg)?;
    let failures = sweep
        .trials
        .iter()
        .filter(|t| t.delta > sweep_cfg.tolerance)
        .map(|t| format!("trial {}: delta {:e} exceeds {:e}", t.index, t.delta, sweep_cfg.tolerance))
        .collect();

    #[derive(Serialize)]
    struct Row<'a> {
        index: usize,
        n_qubits: usize,
        rank: usize,
        channel: &'a str,
        disturbed: String,
        measured: String,
        delta: f64,
    }
    let cols = vec!["index", "n_qubits", "rank", "channel", "disturbed", "measured", "delta"];
    let rows: Vec<Row> = sweep
        .trials
        .iter()
        .map(|t| Row {
            index: t.index,
            n_qubits: t.n_qubits,
            rank: t.rank,
            channel: &t.channel,
            disturbed: t.disturbed.to_string(),
            measured: t.measured.to_string(),
            delta: t.delta,
        })
        .collect();
    let csv = render_csv(&cols, &rows)?;
    Ok(Body {
        result: json!({
            "tolerance": sweep_cfg.tolerance,
            "max_delta": sweep.max_delta,
            "failures": sweep.failures,
            "trials": sweep.trials,
        }),
        failures,
        csv: Some((cols, csv)),
    })
}

fn lightcone(cfg: &mut ExperimentConfig) -> Result<Body> {
    let sites = *cfg.sites.get_or_insert(6);
    let layers = *cfg.layers.get_or_insert(3);
    let dt = *cfg.dt.get_or_insert(0.1);
    let disturb = *cfg.disturb.get_or_insert(0);
    let model = cfg.model.get_or_insert_with(|| "ising:J=1,g=1".into()).clone();
    let channel_spec = cfg.channel.get_or_insert_with(|| "x".into()).clone();
    let state_spec = cfg.state.get_or_insert_with(|| "ghz".into()).clone();

    let h = parse_model(&model, sites)?;
    cfg.sites = Some(h.n_sites());
    let initial = parse_state(&state_spec, h.n_sites(), cfg.seed_or_default())?;
    let channel = parse_channel(&channel_spec, disturb)?;
    let map = lightcone_sweep(&h, dt, layers, disturb, &channel, &initial)?;

    let tol = cfg.tolerances.cone;
    let rows = map.rows();
    let failures = rows
        .iter()
        .filter(|r| !r.in_cone && r.delta > tol)
        .map(|r| format!("site {} layer {}: out-of-cone delta {:e} exceeds {:e}", r.site, r.layer, r.delta, tol))
        .collect();
    let cones: Vec<Vec<usize>> = map
        .in_cone
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &c)| c).map(|(s, _)| s).collect())
        .collect();
    let cols = vec!["site", "layer", "delta", "in_cone"];
    let csv = render_csv(&cols, &rows)?;
    Ok(Body {
        result: json!({
            "n_sites": map.n_sites,
            "layers": map.layers,
            "disturb_site": map.disturb_site,
            "disturbance": channel.name(),
            "tolerance": tol,
            "max_out_of_cone": map.max_out_of_cone(),
            "cones": cones,
            "rows": rows,
        }),
        failures,
        csv: Some((cols, csv)),
    })
}

fn chsh(cfg: &mut ExperimentConfig) -> Result<Body> {
    let state_spec = cfg.state.get_or_insert_with(|| "bell:phi+".into()).clone();
    let angles = *cfg.angles.get_or_insert(OPTIMAL_ANGLES);
    let channel_spec = cfg.channel.get_or_insert_with(|| "h".into()).clone();
    let rho = parse_state(&state_spec, 2, cfg.seed_or_default())?;
    let r = chsh_experiment(&rho, angles)?;
    let bound = 2.0 * std::f64::consts::SQRT_2 + cfg.tolerances.chsh;

    // the same state, disturbed on site 1, seen from site 0
    let channel = parse_channel(&channel_spec, 1)?;
    let ns = no_signaling_check_at(&rho, &channel, &SiteSet::single(0), cfg.tolerances.eq)?;

    let mut failures = Vec::new();
    if r.s.abs() > bound {
        failures.push(format!("|S| = {} exceeds the Tsirelson bound", r.s.abs()));
    }
    if !channel.is_nonlinear() && !ns.passes {
        failures.push(format!("disturbance {} moved the far marginal by {:e}", channel, ns.delta));
    }
    Ok(Body {
        result: json!({
            "angles": r.angles,
            "correlators": r.correlators,
            "S": r.s,
            "exceeds_classical": r.exceeds_classical,
            "within_tsirelson": r.s.abs() <= bound,
            "no_signaling": ns,
        }),
        failures,
        csv: None,
    })
}

fn detect(cfg: &mut ExperimentConfig) -> Result<Body> {
    let trials = *cfg.trials.get_or_insert(200);
    let site = *cfg.disturb.get_or_insert(1);
    let channel_spec = cfg.channel.get_or_insert_with(|| "toy-collapse".into()).clone();
    let channel = parse_channel(&channel_spec, site)?;
    let verdict = detect_signaling(&channel, trials, cfg.seed_or_default(), cfg.execution)?;
    let expected = channel.is_nonlinear();
    let mut failures = Vec::new();
    if verdict.signals != expected {
        failures.push(format!(
            "{} was expected to {}signal but max delta is {:e}",
            channel,
            if expected { "" } else { "not " },
            verdict.max_delta
        ));
    }
    Ok(Body {
        result: json!({
            "expected_signals": expected,
            "verdict": verdict,
        }),
        failures,
        csv: None,
    })
}

fn evolve(cfg: &mut ExperimentConfig) -> Result<Body> {
    let sites = *cfg.sites.get_or_insert(4);
    let time = *cfg.time.get_or_insert(1.0);
    let dt = *cfg.dt.get_or_insert(0.05);
    let model = cfg.model.get_or_insert_with(|| "ising:J=1,g=1".into()).clone();
    let state_spec = cfg.state.get_or_insert_with(|| "random:2".into()).clone();
    if time < 0.0 {
        return Err(Error::Config(format!("evolve needs a non-negative time, got {time}")));
    }
    let h = parse_model(&model, sites)?;
    cfg.sites = Some(h.n_sites());
    let rho = parse_state(&state_spec, h.n_sites(), cfg.seed_or_default())?;
    let out = evolve_von_neumann(&rho, &h, time)?;

    let before = rho.eigenvalues()?;
    let after = out.eigenvalues()?;
    let spectrum = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let trace = (out.matrix().trace() - rho.matrix().trace()).norm();
    let hermiticity = out.matrix().hermiticity_defect();
    let purity = (out.purity() - rho.purity()).abs();
    let exact_unitarity = is_unitary(&herm_expm(&h.total()?, time)?, cfg.tolerances.eq);

    let steps = (time / dt).round() as usize;
    let layers = *cfg.layers.get_or_insert(2 * steps);
    let circuit = build_trotter(&h, dt, layers)?;
    let trotter_unitarity = is_unitary(&circuit.unitary(layers)?, cfg.tolerances.eq);
    let trotter = circuit.evolve(&rho, layers)?;
    let trotter_error = trotter.matrix().max_abs_diff(out.matrix());

    let tol = cfg.tolerances.eq;
    let mut failures = Vec::new();
    for (name, v) in [
        ("trace", trace),
        ("hermiticity", hermiticity),
        ("spectrum", spectrum),
        ("purity", purity),
        ("exact unitarity", exact_unitarity.deviation),
        ("trotter unitarity", trotter_unitarity.deviation),
    ] {
        if v > tol {
            failures.push(format!("{name} defect {v:e} exceeds {tol:e}"));
        }
    }
    Ok(Body {
        result: json!({
            "time": time,
            "conservation": {
                "trace": trace,
                "hermiticity": hermiticity,
                "spectrum": spectrum,
                "purity": purity,
            },
            "unitarity": {
                "exact": exact_unitarity,
                "trotter": trotter_unitarity,
            },
            "trotter": {
                "dt": dt,
                "layers": layers,
                "max_abs_error": trotter_error,
            },
            "initial_purity": rho.purity(),
            "final_state": StateFile::from(&out),
        }),
        failures,
        csv: None,
    })
}

fn validate(cfg: &mut ExperimentConfig) -> Result<Body> {
    if cfg.state.is_none() && cfg.channel.is_none() {
        return Err(Error::Config("validate needs --state and/or --channel".into()));
    }
    let mut result = serde_json::Map::new();
    let mut failures = Vec::new();
    if let Some(spec) = cfg.state.clone() {
        let report = if spec.ends_with(".json") {
            let file = StateFile::from_json(&read(&spec)?)?;
            let m = file.raw_matrix()?;
            if file.kind == crate::state::StateKind::Pure {
                let norm: f64 = file.entries.iter().map(|[re, im]| re * re + im * im).sum::<f64>();
                if (norm.sqrt() - 1.0).abs() > cfg.tolerances.eq {
                    failures.push(format!("state vector norm {} is not 1", norm.sqrt()));
                }
            }
            validate_matrix(&m, &file.shape()?)?
        } else {
            let n = cfg.sites.or(cfg.qubits).unwrap_or(2);
            validate_state(&parse_state(&spec, n, cfg.seed_or_default())?)
        };
        if !report.passes {
            failures.push(format!("state: {report}"));
        }
        result.insert("state".into(), serde_json::to_value(report)?);
    }
    if let Some(spec) = cfg.channel.clone() {
        let ch = if spec.ends_with(".json") {
            ChannelFile::from_json(&read(&spec)?)?.to_channel()?
        } else {
            parse_channel(&spec, cfg.disturb.unwrap_or(0))?
        };
        let report = validate_channel(&ch);
        if !report.passes {
            failures.push(format!(
                "channel {ch}: {} check fails (defect {})",
                report.condition,
                report.defect.map_or("n/a".to_string(), |d| format!("{d:e}"))
            ));
        }
        result.insert("channel_id".into(), Value::String(ch.to_string()));
        result.insert("channel".into(), serde_json::to_value(report)?);
    }
    Ok(Body {
        result: Value::Object(result),
        failures,
        csv: None,
    })
}
