//! String specs for states, channels and models, as accepted on the command
//! line and in config files.

use std::path::Path;

use crate::channel::{Channel, ChannelFile};
use crate::error::{Error, Result};
use crate::lattice::{HamiltonianSpec, LatticeHamiltonian, ModelSpec};
use crate::state::{bell_state, ghz_state, pure_to_density, random_density, DensityOperator, PureState, StateFile};
use crate::tensor::SystemShape;
use crate::C64;

fn looks_like_file(spec: &str) -> bool {
    spec.ends_with(".json") || spec.ends_with(".toml") || Path::new(spec).is_file()
}

pub(crate) fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })
}

/// Resolves a state spec on `n_sites` qubits (when the spec needs a size).
///
/// Accepted: `bell:phi+|phi-|psi+|psi-`, `ghz`, `zero`, `plus`, `mixed`,
/// `random[:rank]` (drawn from `seed`), or a path to a state JSON file.
pub fn parse_state(spec: &str, n_sites: usize, seed: u64) -> Result<DensityOperator> {
    if looks_like_file(spec) {
        return StateFile::from_json(&read(spec)?)?.to_density();
    }
    let (head, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let shape = || SystemShape::qubits(n_sites);
    match head.to_ascii_lowercase().as_str() {
        "bell" if n_sites != 2 => Err(Error::Config(format!("`{spec}` is a 2-site state, {n_sites} sites requested"))),
        "bell" => Ok(pure_to_density(&bell_state(arg.parse()?))),
        "ghz" => Ok(pure_to_density(&ghz_state(n_sites)?)),
        "zero" => Ok(pure_to_density(&PureState::basis(shape()?, 0)?)),
        "plus" => {
            let shape = shape()?;
            let amp = C64::new(1.0 / (shape.total_dim() as f64).sqrt(), 0.0);
            Ok(pure_to_density(&PureState::normalized(vec![amp; shape.total_dim()], shape)?))
        }
        "mixed" => Ok(DensityOperator::maximally_mixed(shape()?)),
        "random" => {
            let rank = if arg.is_empty() {
                1
            } else {
                arg.parse()
                    .map_err(|_| Error::Config(format!("bad rank in state spec `{spec}`")))?
            };
            random_density(&shape()?, rank, seed)
        }
        _ => Err(Error::Config(format!("unknown state spec `{spec}`"))),
    }
}

/// A built-in channel id placed on `site`, or a channel JSON file.
pub fn parse_channel(spec: &str, site: usize) -> Result<Channel> {
    if looks_like_file(spec) {
        return ChannelFile::from_json(&read(spec)?)?.to_channel();
    }
    Channel::builtin(spec, site)
}

/// A named model (`ising:J=1,g=1`) on `n_sites`, or a Hamiltonian JSON/TOML
/// file, which carries its own size.
pub fn parse_model(spec: &str, n_sites: usize) -> Result<LatticeHamiltonian> {
    if looks_like_file(spec) {
        let text = read(spec)?;
        let hs = if spec.ends_with(".toml") {
            HamiltonianSpec::from_toml(&text)?
        } else {
            HamiltonianSpec::from_json(&text)?
        };
        return hs.build();
    }
    spec.parse::<ModelSpec>()?.build(n_sites)
}
