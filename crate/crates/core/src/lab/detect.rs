use serde::{Deserialize, Serialize};

use super::{no_signaling_check_at, trial_rng};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::state::{pure_to_density, random_pure, StateFile};
use crate::tensor::{SiteSet, SystemShape};
use crate::tol;

/// A map is declared signaling once some witness moves the far marginal by
/// more than this.
pub const SIGNALING_THRESHOLD: f64 = 10.0 * tol::EQ;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalingVerdict {
    pub map: String,
    pub trials: usize,
    pub seed: u64,
    pub signals: bool,
    pub max_delta: f64,
    /// Trial index of the first state reaching `max_delta`.
    pub witness_trial: Option<usize>,
    pub witness: Option<StateFile>,
}

/// Searches random entangled two-qubit pure states for one whose far
/// marginal is moved by `map`.
pub fn detect_signaling(map: &Channel, trials: usize, seed: u64, exec: Execution) -> Result<SignalingVerdict> {
    let support = map.support();
    if support.len() != 1 || support.as_slice()[0] > 1 {
        return Err(Error::Shape(format!(
            "detector needs a single-site map on a two-qubit system, got support {support}"
        )));
    }
    let measured = SiteSet::single(1 - support.as_slice()[0]);
    let shape = SystemShape::qubits(2)?;
    let deltas: Vec<f64> = map_indexed(trials, exec, |i| -> Result<f64> {
        let rho = pure_to_density(&random_pure(&shape, &mut trial_rng(seed, i)));
        Ok(no_signaling_check_at(&rho, map, &measured, tol::EQ)?.delta)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut best: Option<(usize, f64)> = None;
    for (i, &d) in deltas.iter().enumerate() {
        if best.is_none_or(|(_, b)| d > b) {
            best = Some((i, d));
        }
    }
    let max_delta = best.map_or(0.0, |(_, d)| d);
    let witness = best.map(|(i, _)| StateFile::from(&random_pure(&shape, &mut trial_rng(seed, i))));
    Ok(SignalingVerdict {
        map: map.to_string(),
        trials,
        seed,
        signals: max_delta > SIGNALING_THRESHOLD,
        max_delta,
        witness_trial: best.map(|(i, _)| i),
        witness,
    })
}
