use serde::{Deserialize, Serialize};

use crate::channel::{apply_channel, Channel};
use crate::error::{Error, Result};
use crate::lattice::{build_trotter, causal_cone, LatticeHamiltonian};
use crate::par::{map_indexed, Execution};
use crate::state::DensityOperator;
use crate::tensor::SiteSet;

/// Per-(site, layer) distance between disturbed and undisturbed single-site
/// reduced states. Layer `ℓ` means after `ℓ` circuit layers, `0..=layers`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightconeMap {
    pub n_sites: usize,
    pub layers: usize,
    pub disturb_site: usize,
    /// `deltas[layer][site]`
    pub deltas: Vec<Vec<f64>>,
    /// `in_cone[layer][site]`
    pub in_cone: Vec<Vec<bool>>,
}

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightconeRow {
    pub site: usize,
    pub layer: usize,
    pub delta: f64,
    pub in_cone: bool,
}

impl LightconeMap {
    pub fn delta(&self, site: usize, layer: usize) -> f64 {
        self.deltas[layer][site]
    }

    /// Rows ordered by site, then layer.
    pub fn rows(&self) -> Vec<LightconeRow> {
        (0..self.n_sites)
            .flat_map(|site| {
                (0..=self.layers).map(move |layer| LightconeRow {
                    site,
                    layer,
                    delta: self.deltas[layer][site],
                    in_cone: self.in_cone[layer][site],
                })
            })
            .collect()
    }

    /// Largest δ over all `(site, layer)` outside the causal cone.
    pub fn max_out_of_cone(&self) -> f64 {
        self.rows()
            .iter()
            .filter(|r| !r.in_cone)
            .map(|r| r.delta)
            .fold(0.0, f64::max)
    }
}

/// Runs the Trotter circuit on `initial` with and without `disturbance`
/// (applied once, before the first layer) and records single-site δ.
pub fn lightcone_sweep(
    h: &LatticeHamiltonian,
    dt: f64,
    layers: usize,
    disturb_site: usize,
    disturbance: &Channel,
    initial: &DensityOperator,
) -> Result<LightconeMap> {
    if initial.shape() != h.shape() {
        return Err(Error::Shape("initial state and Hamiltonian shapes differ".into()));
    }
    if disturbance.support() != &SiteSet::single(disturb_site) {
        return Err(Error::Shape(format!(
            "disturbance acts on {}, expected {{{disturb_site}}}",
            disturbance.support()
        )));
    }
    let circuit = build_trotter(h, dt, layers)?;
    let n = h.n_sites();
    let mut plain = initial.clone();
    let mut kicked = apply_channel(disturbance, initial)?;
    let mut deltas = Vec::with_capacity(layers + 1);
    let mut in_cone = Vec::with_capacity(layers + 1);
    for l in 0..=layers {
        if l > 0 {
            plain = circuit.apply_layer(&plain, l - 1)?;
            kicked = circuit.apply_layer(&kicked, l - 1)?;
        }
        let row = map_indexed(n, Execution::Parallel, |s| -> Result<f64> {
            let keep = SiteSet::single(s);
            Ok(kicked.reduced(&keep)?.matrix().max_abs_diff(plain.reduced(&keep)?.matrix()))
        });
        deltas.push(row.into_iter().collect::<Result<Vec<_>>>()?);
        let cone = causal_cone(&circuit, disturb_site, l)?;
        in_cone.push((0..n).map(|s| cone.contains(s)).collect());
    }
    Ok(LightconeMap {
        n_sites: n,
        layers,
        disturb_site,
        deltas,
        in_cone,
    })
}
