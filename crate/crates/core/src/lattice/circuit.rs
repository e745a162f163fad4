use crate::channel::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::lattice::LatticeHamiltonian;
use crate::state::{DensityOperator, PureState};
use crate::tensor::{conjugate_local, embed_local, herm_expm, is_unitary, partial_trace, ComplexMatrix, SiteSet, SystemShape};
use crate::tol;

/// A unitary acting on one site or one bond.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub sites: SiteSet,
    pub unitary: ComplexMatrix,
}

impl Gate {
    pub fn new(sites: SiteSet, unitary: ComplexMatrix) -> Self {
        Self { sites, unitary }
    }
}

/// Ordered layers of gates; gates within one layer have disjoint supports.
#[derive(Clone, Debug, PartialEq)]
pub struct TrotterCircuit {
    shape: SystemShape,
    layers: Vec<Vec<Gate>>,
}

impl TrotterCircuit {
    /// Checks every gate's support, dimension, unitarity and the
    /// disjointness of each layer.
    pub fn from_layers(shape: SystemShape, layers: Vec<Vec<Gate>>) -> Result<Self> {
        for (l, layer) in layers.iter().enumerate() {
            let mut used = SiteSet::empty();
            for g in layer {
                shape.check_sites(&g.sites)?;
                if g.sites.is_empty() {
                    return Err(Error::Structural(format!("layer {l} has a gate with no sites")));
                }
                let d = shape.dim_of(&g.sites);
                if g.unitary.rows() != d || g.unitary.cols() != d {
                    return Err(Error::Shape(format!(
                        "gate on {} in layer {l} is {}x{}, expected {d}x{d}",
                        g.sites,
                        g.unitary.rows(),
                        g.unitary.cols()
                    )));
                }
                let check = is_unitary(&g.unitary, tol::UNIT);
                if !check.unitary {
                    return Err(Error::Structural(format!(
                        "gate on {} in layer {l} is not unitary (deviation {:.3e})",
                        g.sites, check.deviation
                    )));
                }
                if !g.sites.is_disjoint(&used) {
                    return Err(Error::Structural(format!(
                        "gate on {} overlaps another gate in layer {l}",
                        g.sites
                    )));
                }
                used = used.union(&g.sites);
            }
        }
        Ok(Self { shape, layers })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn n_sites(&self) -> usize {
        self.shape.n_sites()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn layer(&self, l: usize) -> &[Gate] {
        &self.layers[l]
    }

    fn check_depth(&self, layers: usize) -> Result<()> {
        if layers > self.depth() {
            return Err(Error::Shape(format!(
                "{layers} layers requested from a depth-{} circuit",
                self.depth()
            )));
        }
        Ok(())
    }

    /// Full-space product of the first `layers` layers, latest layer leftmost.
    pub fn unitary(&self, layers: usize) -> Result<ComplexMatrix> {
        self.check_depth(layers)?;
        let mut u = ComplexMatrix::identity(self.shape.total_dim());
        for layer in &self.layers[..layers] {
            for g in layer {
                u = embed_local(&g.unitary, &g.sites, &self.shape)?.matmul(&u)?;
            }
        }
        Ok(u)
    }

    /// Applies layer `l` to a density operator.
    pub fn apply_layer(&self, rho: &DensityOperator, l: usize) -> Result<DensityOperator> {
        self.check_depth(l + 1)?;
        let mut m = rho.matrix().clone();
        for g in &self.layers[l] {
            m = conjugate_local(&m, &g.unitary, &g.sites, &self.shape)?;
        }
        Ok(DensityOperator::from_parts(m, rho.shape().clone()))
    }

    /// Applies the first `layers` layers to a density operator.
    pub fn evolve(&self, rho: &DensityOperator, layers: usize) -> Result<DensityOperator> {
        self.check_depth(layers)?;
        (0..layers).try_fold(rho.clone(), |acc, l| self.apply_layer(&acc, l))
    }

    /// Applies the first `layers` layers to a state vector.
    pub fn evolve_pure(&self, psi: &PureState, layers: usize) -> Result<PureState> {
        psi.evolve(&self.unitary(layers)?)
    }

    pub(crate) fn apply_gate(&self, m: &ComplexMatrix, l: usize, k: usize) -> Result<ComplexMatrix> {
        let g = &self.layers[l][k];
        conjugate_local(m, &g.unitary, &g.sites, &self.shape)
    }
}

/// First-order brickwork circuit of `n_layers` alternating even/odd layers.
pub fn build_trotter(h: &LatticeHamiltonian, dt: f64, n_layers: usize) -> Result<TrotterCircuit> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let gens = h.bond_generators()?;
    let gates: Vec<ComplexMatrix> = gens.iter().map(|g| herm_expm(g, dt)).collect::<Result<_>>()?;
    let n = h.n_sites();
    let layers = (0..n_layers)
        .map(|l| {
            if n == 1 {
                return if l % 2 == 0 {
                    vec![Gate::new(SiteSet::single(0), gates[0].clone())]
                } else {
                    Vec::new()
                };
            }
            (0..n - 1)
                .filter(|b| b % 2 == l % 2)
                .map(|b| Gate::new(SiteSet::range(b, b + 2), gates[b].clone()))
                .collect()
        })
        .collect();
    TrotterCircuit::from_layers(h.shape().clone(), layers)
}

/// Sites reachable from `origin` through gates of the first `layers_elapsed`
/// layers.
pub fn causal_cone(circuit: &TrotterCircuit, origin: usize, layers_elapsed: usize) -> Result<SiteSet> {
    if origin >= circuit.n_sites() {
        return Err(Error::Shape(format!(
            "origin {origin} out of range for a {}-site circuit",
            circuit.n_sites()
        )));
    }
    circuit.check_depth(layers_elapsed)?;
    let mut cone = SiteSet::single(origin);
    for layer in &circuit.layers[..layers_elapsed] {
        // gates in a layer are disjoint, so one pass per layer suffices
        let mut grown = cone.clone();
        for g in layer.iter().filter(|g| !g.sites.is_disjoint(&cone)) {
            grown = grown.union(&g.sites);
        }
        cone = grown;
    }
    Ok(cone)
}

/// Propagates a unitary disturbance through the first `layers` layers and
/// certifies that the result is the identity outside `cone`.
///
/// Computes `W = U·Ṽ·U†` on the full space, extracts the candidate block
/// `W_cone = Tr_{¬cone}(W) / d_{¬cone}` and requires
/// `embed_local(W_cone, cone) = W` within [`tol::EQ`]. The returned channel
/// acts as `W_cone` on `cone`. A failed certificate means `cone` is not a
/// light cone of the disturbance for this circuit.
pub fn restricted_unitary(
    circuit: &TrotterCircuit,
    layers: usize,
    cone: &SiteSet,
    disturbance: &Channel,
) -> Result<Channel> {
    let shape = circuit.shape();
    shape.check_sites(cone)?;
    let ChannelKind::Unitary(v) = disturbance.kind() else {
        return Err(Error::ChannelValidation(format!("{disturbance} is not a unitary disturbance")));
    };
    if !disturbance.support().is_subset(cone) {
        return Err(Error::Structural(format!(
            "disturbance support {} lies outside the cone {cone}",
            disturbance.support()
        )));
    }
    let u = circuit.unitary(layers)?;
    let w = u
        .matmul(&embed_local(v, disturbance.support(), shape)?)?
        .matmul(&u.adjoint())?;
    let outside = shape.total_dim() / shape.dim_of(cone);
    let block = partial_trace(&w, shape, cone)?.scale_real(1.0 / outside as f64);
    let defect = embed_local(&block, cone, shape)?.max_abs_diff(&w);
    if defect > tol::EQ {
        return Err(Error::Structural(format!(
            "propagated disturbance acts outside {cone} (defect {defect:.3e})"
        )));
    }
    Channel::unitary(format!("propagated:{}", disturbance.name()), block, cone.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pauli_x;

    fn ising(n: usize) -> LatticeHamiltonian {
        LatticeHamiltonian::ising(n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn brickwork_parity() {
        let c = build_trotter(&ising(5), 0.1, 3).unwrap();
        let sites = |l: usize| c.layer(l).iter().map(|g| g.sites.as_slice().to_vec()).collect::<Vec<_>>();
        assert_eq!(sites(0), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(sites(1), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(sites(2), sites(0));
    }

    #[test]
    fn zero_hamiltonian_gives_identity_layers() {
        let h = LatticeHamiltonian::new(4, 2).unwrap();
        let c = build_trotter(&h, 0.3, 4).unwrap();
        assert!(c.unitary(4).unwrap().max_abs_diff(&ComplexMatrix::identity(16)) < 1e-15);
    }

    #[test]
    fn rejects_bad_dt() {
        assert!(build_trotter(&ising(3), 0.0, 2).is_err());
        assert!(build_trotter(&ising(3), f64::NAN, 2).is_err());
    }

    #[test]
    fn cone_basics() {
        let c = build_trotter(&ising(6), 0.1, 4).unwrap();
        for o in 0..6 {
            assert_eq!(causal_cone(&c, o, 0).unwrap(), SiteSet::single(o));
        }
        assert_eq!(causal_cone(&c, 0, 1).unwrap().as_slice(), &[0, 1]);
        assert_eq!(causal_cone(&c, 0, 2).unwrap().as_slice(), &[0, 1, 2]);
        assert_eq!(causal_cone(&c, 3, 2).unwrap().as_slice(), &[1, 2, 3, 4]);
        assert!(causal_cone(&c, 6, 1).is_err());
        assert!(causal_cone(&c, 0, 5).is_err());
    }

    #[test]
    fn overlapping_layer_rejected() {
        let shape = SystemShape::qubits(3).unwrap();
        let g = |a, b| Gate::new(SiteSet::range(a, b), ComplexMatrix::identity(1 << (b - a)));
        let err = TrotterCircuit::from_layers(shape, vec![vec![g(0, 2), g(1, 3)]]);
        assert!(matches!(err, Err(Error::Structural(_))));
    }

    #[test]
    fn restricted_unitary_zero_layers() {
        let c = build_trotter(&ising(4), 0.1, 2).unwrap();
        let id = Channel::identity(2, 2);
        let ch = restricted_unitary(&c, 0, &SiteSet::single(2), &id).unwrap();
        assert_eq!(ch.support(), &SiteSet::single(2));
        let ChannelKind::Unitary(w) = ch.kind() else { panic!() };
        assert!(w.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let x = Channel::unitary("x", pauli_x(), SiteSet::single(2)).unwrap();
        let ChannelKind::Unitary(w) = restricted_unitary(&c, 0, &SiteSet::single(2), &x).unwrap().kind().clone() else {
            panic!()
        };
        assert!(w.max_abs_diff(&pauli_x()) < 1e-15);
    }

    #[test]
    fn restricted_unitary_certifies_cone_and_rejects_small_cone() {
        let c = build_trotter(&ising(5), 0.2, 3).unwrap();
        let x = Channel::unitary("x", pauli_x(), SiteSet::single(0)).unwrap();
        for layers in 0..=3 {
            let cone = causal_cone(&c, 0, layers).unwrap();
            let ch = restricted_unitary(&c, layers, &cone, &x).unwrap();
            assert_eq!(ch.support(), &cone);
            if layers > 0 {
                let short = SiteSet::range(0, cone.len() - 1);
                assert!(matches!(
                    restricted_unitary(&c, layers, &short, &x.moved_to(SiteSet::single(0)).unwrap()),
                    Err(Error::Structural(_))
                ));
            }
        }
    }
}
