use crate::error::{Error, Result};
use crate::lattice::TrotterCircuit;
use crate::state::DensityOperator;

/// A density operator on a staircase cut through a circuit.
///
/// `clock[s]` counts the layers absorbed at site `s`. A gate in layer `ℓ` is
/// absorbed iff every site it touches has `clock > ℓ`; a cut that absorbs a
/// gate at some but not all of its sites is invalid.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceState {
    rho: DensityOperator,
    clock: Vec<usize>,
}

impl SurfaceState {
    /// The flat initial surface, every clock at zero.
    pub fn initial(rho: DensityOperator) -> Self {
        let clock = vec![0; rho.shape().n_sites()];
        Self { rho, clock }
    }

    /// Wraps a state already evolved up to `clock`.
    pub fn new(rho: DensityOperator, clock: Vec<usize>, circuit: &TrotterCircuit) -> Result<Self> {
        check_cut(circuit, &clock)?;
        if rho.shape() != circuit.shape() {
            return Err(Error::Shape("state and circuit shapes differ".into()));
        }
        Ok(Self { rho, clock })
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn clock(&self) -> &[usize] {
        &self.clock
    }
}

fn check_cut(circuit: &TrotterCircuit, clock: &[usize]) -> Result<()> {
    if clock.len() != circuit.n_sites() {
        return Err(Error::Surface(format!(
            "clock has {} entries for {} sites",
            clock.len(),
            circuit.n_sites()
        )));
    }
    if let Some(s) = clock.iter().position(|&c| c > circuit.depth()) {
        return Err(Error::Surface(format!(
            "site {s} clock {} exceeds circuit depth {}",
            clock[s],
            circuit.depth()
        )));
    }
    for (l, layer) in circuit.layers().iter().enumerate() {
        for g in layer {
            let inside = g.sites.iter().filter(|&s| clock[s] > l).count();
            if inside != 0 && inside != g.sites.len() {
                return Err(Error::Surface(format!(
                    "gate on {} in layer {l} is half-absorbed by clock {clock:?}",
                    g.sites
                )));
            }
        }
    }
    Ok(())
}

fn absorbed(circuit: &TrotterCircuit, clock: &[usize], l: usize, k: usize) -> bool {
    circuit.layer(l)[k].sites.iter().all(|s| clock[s] > l)
}

/// Gates absorbed by `new` but not by `old`, as `(layer, index)` in layer order.
pub(crate) fn newly_absorbed(circuit: &TrotterCircuit, old: &[usize], new: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in 0..circuit.depth() {
        for k in 0..circuit.layer(l).len() {
            if absorbed(circuit, new, l, k) && !absorbed(circuit, old, l, k) {
                out.push((l, k));
            }
        }
    }
    out
}

/// Moves each site's clock forward by `site_advances` and applies exactly the
/// gates that the move absorbs.
pub fn advance_surface(s: &SurfaceState, circuit: &TrotterCircuit, site_advances: &[usize]) -> Result<SurfaceState> {
    if site_advances.len() != s.clock.len() {
        return Err(Error::Surface(format!(
            "{} advances for {} sites",
            site_advances.len(),
            s.clock.len()
        )));
    }
    if s.rho.shape() != circuit.shape() {
        return Err(Error::Shape("state and circuit shapes differ".into()));
    }
    check_cut(circuit, &s.clock)?;
    let clock: Vec<usize> = s.clock.iter().zip(site_advances).map(|(c, a)| c + a).collect();
    check_cut(circuit, &clock)?;
    let mut m = s.rho.matrix().clone();
    for (l, k) in newly_absorbed(circuit, &s.clock, &clock) {
        m = circuit.apply_gate(&m, l, k)?;
    }
    Ok(SurfaceState {
        rho: DensityOperator::from_parts(m, s.rho.shape().clone()),
        clock,
    })
}
