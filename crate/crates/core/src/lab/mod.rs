//! The experiments: no-signaling checks and sweeps, light-cone sweeps, CHSH
//! correlations and the signaling detector.
//!
//! Every randomized routine derives one RNG stream per trial from
//! `(seed, trial index)`, so results are identical under sequential and
//! parallel execution.

mod chsh;
mod detect;
mod lightcone;
mod nosignal;

pub use chsh::{chsh_experiment, ChshResult, OPTIMAL_ANGLES};
pub use detect::{detect_signaling, SignalingVerdict, SIGNALING_THRESHOLD};
pub use lightcone::{lightcone_sweep, LightconeMap, LightconeRow};
pub use nosignal::{no_signaling_check, no_signaling_check_at, no_signaling_sweep, random_cptp, NoSignalReport, SweepConfig, SweepReport, TrialRecord};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent RNG stream for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}
