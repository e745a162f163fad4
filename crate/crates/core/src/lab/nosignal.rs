use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trial_rng;
use crate::channel::{apply_channel, random_kraus, random_unitary, Channel};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::state::{random_density_with, DensityOperator};
use crate::tensor::{SiteSet, SystemShape};
use crate::tol;

/// Outcome of comparing a reduced state with and without a disturbance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoSignalReport {
    pub state_id: Option<String>,
    pub disturbance_id: String,
    pub measured: SiteSet,
    pub disturbed: SiteSet,
    /// `‖ρ_A(disturbed) − ρ_A(undisturbed)‖_max`
    pub delta: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// [`no_signaling_check_at`] with the default tolerance [`tol::EQ`].
pub fn no_signaling_check(rho: &DensityOperator, disturbance: &Channel, measured: &SiteSet) -> Result<NoSignalReport> {
    no_signaling_check_at(rho, disturbance, measured, tol::EQ)
}

/// Applies `disturbance` and compares the reduced state on `measured`
/// against the undisturbed one.
///
/// The measured sites must not overlap the disturbance support.
pub fn no_signaling_check_at(
    rho: &DensityOperator,
    disturbance: &Channel,
    measured: &SiteSet,
    tolerance: f64,
) -> Result<NoSignalReport> {
    rho.shape().check_sites(measured)?;
    if !measured.is_disjoint(disturbance.support()) {
        return Err(Error::Partition {
            measured: measured.as_slice().to_vec(),
            disturbed: disturbance.support().as_slice().to_vec(),
        });
    }
    let before = rho.reduced(measured)?;
    let after = apply_channel(disturbance, rho)?.reduced(measured)?;
    let delta = after.matrix().max_abs_diff(before.matrix());
    Ok(NoSignalReport {
        state_id: None,
        disturbance_id: disturbance.name().to_string(),
        measured: measured.clone(),
        disturbed: disturbance.support().clone(),
        delta,
        tolerance,
        passes: delta <= tolerance,
    })
}

/// Draws a random CPTP disturbance on `support`: a Haar unitary, a random
/// Kraus set, or (single qubit sites only) a built-in with random parameter.
pub fn random_cptp<R: Rng + ?Sized>(shape: &SystemShape, support: &SiteSet, rng: &mut R) -> Result<Channel> {
    let d = shape.dim_of(support);
    let qubit = support.len() == 1 && d == 2;
    let pick = rng.random_range(0..if qubit { 5 } else { 2 });
    let site = support.as_slice()[0];
    match pick {
        0 => Channel::unitary("random-unitary", random_unitary(d, rng), support.clone()),
        1 => {
            let count = rng.random_range(1..=4);
            Channel::kraus(format!("random-kraus:{count}"), random_kraus(d, count, rng)?, support.clone())
        }
        2 => Channel::depolarizing(rng.random_range(0.0..=1.0), site),
        3 => Channel::amplitude_damping(rng.random_range(0.0..=1.0), site),
        _ => Channel::z_measurement(site, 2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub trials: usize,
    pub seed: u64,
    /// Fixed qubit count, or `None` for a uniform draw from 2..=4.
    pub qubits: Option<usize>,
    pub tolerance: f64,
    pub execution: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trials: 500,
            seed: 0,
            qubits: None,
            tolerance: tol::EQ,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub n_qubits: usize,
    pub rank: usize,
    pub channel: String,
    pub disturbed: SiteSet,
    pub measured: SiteSet,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub trials: Vec<TrialRecord>,
    pub max_delta: f64,
    pub failures: usize,
    pub passes: bool,
}

fn sweep_trial(cfg: &SweepConfig, index: usize) -> Result<TrialRecord> {
    let mut rng = trial_rng(cfg.seed, index);
    let n = match cfg.qubits {
        Some(n) => n,
        None => rng.random_range(2..=4),
    };
    if n < 2 {
        return Err(Error::Config(format!("a bipartition needs at least 2 qubits, got {n}")));
    }
    let shape = SystemShape::qubits(n)?;
    let rank = rng.random_range(1..=shape.total_dim().min(4));
    let rho = random_density_with(&shape, rank, &mut rng)?;

    let mut sites: Vec<usize> = (0..n).collect();
    sites.shuffle(&mut rng);
    let b_len = rng.random_range(1..=(n - 1).min(2));
    let a_len = rng.random_range(1..=n - b_len);
    let disturbed = SiteSet::new(sites[..b_len].iter().copied())?;
    let measured = SiteSet::new(sites[b_len..b_len + a_len].iter().copied())?;

    let channel = random_cptp(&shape, &disturbed, &mut rng)?;
    let report = no_signaling_check_at(&rho, &channel, &measured, cfg.tolerance)?;
    Ok(TrialRecord {
        index,
        n_qubits: n,
        rank,
        channel: channel.name().to_string(),
        disturbed,
        measured,
        delta: report.delta,
    })
}

/// Seeded random (state, CPTP disturbance, bipartition) triples.
pub fn no_signaling_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let trials: Vec<TrialRecord> = map_indexed(cfg.trials, cfg.execution, |i| sweep_trial(cfg, i))
        .into_iter()
        .collect::<Result<_>>()?;
    let max_delta = trials.iter().map(|t| t.delta).fold(0.0, f64::max);
    let failures = trials.iter().filter(|t| t.delta > cfg.tolerance).count();
    Ok(SweepReport {
        trials,
        max_delta,
        failures,
        passes: failures == 0,
    })
}
