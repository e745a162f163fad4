//! Pure and mixed states, canonical entangled states, seeded random states
//! and validity reports.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigenvalues, partial_trace, tensor_product, ComplexMatrix, SiteSet, SystemShape};
use crate::{tol, C64};

/// Normalized state vector on a tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    shape: SystemShape,
}

impl PureState {
    /// Requires unit norm within [`tol::EQ`].
    pub fn new(amplitudes: Vec<C64>, shape: SystemShape) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                shape.total_dim()
            )));
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("non-finite amplitude".into()));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > tol::EQ {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { amplitudes, shape })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>, shape: SystemShape) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::new(amplitudes, shape)
    }

    /// Computational basis state with composite index `index`.
    pub fn basis(shape: SystemShape, index: usize) -> Result<Self> {
        if index >= shape.total_dim() {
            return Err(Error::Shape(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps, shape)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm_sqr()
    }

    /// `U|ψ⟩`; the result is renormalized against roundoff drift.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::normalized(u.apply(&self.amplitudes)?, self.shape.clone())
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_to_density(psi: &PureState) -> DensityOperator {
    DensityOperator {
        matrix: ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes),
        shape: psi.shape.clone(),
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    shape: SystemShape,
}

impl DensityOperator {
    /// Validates hermiticity, trace and positivity.
    pub fn new(matrix: ComplexMatrix, shape: SystemShape) -> Result<Self> {
        let report = validate_matrix(&matrix, &shape)?;
        if !report.passes {
            return Err(Error::InvalidState(report.to_string()));
        }
        Ok(Self { matrix, shape })
    }

    /// Skips validation; callers guarantee the invariants hold.
    pub(crate) fn from_parts(matrix: ComplexMatrix, shape: SystemShape) -> Self {
        debug_assert_eq!(matrix.rows(), shape.total_dim());
        Self { matrix, shape }
    }

    pub fn maximally_mixed(shape: SystemShape) -> Self {
        let d = shape.total_dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            shape,
        }
    }

    /// `ρ_A ⊗ ρ_B` with the sites of `self` first.
    pub fn product(&self, other: &DensityOperator) -> Result<Self> {
        let dims = self.shape.dims().iter().chain(other.shape.dims()).copied().collect();
        Ok(Self {
            matrix: tensor_product(&self.matrix, &other.matrix)?,
            shape: SystemShape::new(dims)?,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr(ρ·O)`.
    pub fn expectation(&self, observable: &ComplexMatrix) -> Result<C64> {
        let d = self.shape.total_dim();
        if observable.rows() != d || observable.cols() != d {
            return Err(Error::Shape(format!(
                "observable is {}x{}, state dimension {d}",
                observable.rows(),
                observable.cols()
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[(i, j)] * observable[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix.hermitian_part())
    }

    pub fn reduced(&self, keep: &SiteSet) -> Result<ReducedState> {
        Ok(ReducedState {
            matrix: partial_trace(&self.matrix, &self.shape, keep)?,
            kept_sites: keep.clone(),
            parent_shape: self.shape.clone(),
        })
    }

    /// `w·self + (1-w)·other`.
    pub fn mix(&self, w: f64, other: &DensityOperator) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::Shape("mixing states on different shapes".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Domain(format!("mixing weight {w} outside [0, 1]")));
        }
        Ok(Self {
            matrix: self.matrix.scale_real(w).add(&other.matrix.scale_real(1.0 - w))?,
            shape: self.shape.clone(),
        })
    }
}

/// Reduced density operator of a subset of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    matrix: ComplexMatrix,
    kept_sites: SiteSet,
    parent_shape: SystemShape,
}

impl ReducedState {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kept_sites(&self) -> &SiteSet {
        &self.kept_sites
    }

    pub fn parent_shape(&self) -> &SystemShape {
        &self.parent_shape
    }

    /// The reduced state as a standalone density operator on the kept sites.
    pub fn to_density(&self) -> Result<DensityOperator> {
        let dims = self.kept_sites.iter().map(|s| self.parent_shape.dim(s)).collect();
        DensityOperator::new(self.matrix.clone(), SystemShape::new(dims)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellVariant {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellVariant {
    pub const ALL: [BellVariant; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];
}

impl FromStr for BellVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" => Ok(Self::PhiPlus),
            "phi-" | "phiminus" => Ok(Self::PhiMinus),
            "psi+" | "psiplus" => Ok(Self::PsiPlus),
            "psi-" | "psiminus" => Ok(Self::PsiMinus),
            other => Err(Error::Config(format!("unknown Bell variant `{other}`"))),
        }
    }
}

impl fmt::Display for BellVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PhiPlus => "phi+",
            Self::PhiMinus => "phi-",
            Self::PsiPlus => "psi+",
            Self::PsiMinus => "psi-",
        })
    }
}

pub fn bell_state(variant: BellVariant) -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match variant {
        BellVariant::PhiPlus => [h, 0.0, 0.0, h],
        BellVariant::PhiMinus => [h, 0.0, 0.0, -h],
        BellVariant::PsiPlus => [0.0, h, h, 0.0],
        BellVariant::PsiMinus => [0.0, h, -h, 0.0],
    };
    PureState {
        amplitudes: amps.iter().map(|&x| C64::new(x, 0.0)).collect(),
        shape: SystemShape::qubits(2).expect("two qubits"),
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n ≥ 2` qubits.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Domain(format!("GHZ state needs at least 2 sites, got {n}")));
    }
    let shape = SystemShape::qubits(n)?;
    let d = shape.total_dim();
    let mut amps = vec![C64::new(0.0, 0.0); d];
    amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[d - 1] = amps[0];
    Ok(PureState { amplitudes: amps, shape })
}

/// Normalized complex-Gaussian state vector.
pub fn random_pure<R: Rng + ?Sized>(shape: &SystemShape, rng: &mut R) -> PureState {
    loop {
        let amps: Vec<C64> = (0..shape.total_dim())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(psi) = PureState::normalized(amps, shape.clone()) {
            return psi;
        }
    }
}

/// Mixture of `rank` random pure states with flat-Dirichlet weights.
pub fn random_density_with<R: Rng + ?Sized>(shape: &SystemShape, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if rank == 0 || rank > shape.total_dim() {
        return Err(Error::Domain(format!(
            "rank {rank} outside 1..={}",
            shape.total_dim()
        )));
    }
    let raw: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let d = shape.total_dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for w in raw {
        let psi = random_pure(shape, rng);
        acc = acc.add(&ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes).scale_real(w / total))?;
    }
    Ok(DensityOperator::from_parts(acc, shape.clone()))
}

/// Deterministic in `seed`.
pub fn random_density(shape: &SystemShape, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(shape, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Validity defects of a candidate density operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

impl fmt::Display for StateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
        )
    }
}

pub fn validate_state(rho: &DensityOperator) -> StateReport {
    validate_matrix(&rho.matrix, &rho.shape).expect("density operator matches its shape")
}

/// Positivity is judged on the Hermitian part, so a non-Hermitian input
/// still yields all three numbers.
pub fn validate_matrix(m: &ComplexMatrix, shape: &SystemShape) -> Result<StateReport> {
    let d = shape.total_dim();
    if m.rows() != d || m.cols() != d {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, shape dimension {d}",
            m.rows(),
            m.cols()
        )));
    }
    let hermiticity_defect = m.hermiticity_defect();
    let trace_defect = (m.trace() - C64::new(1.0, 0.0)).norm();
    let min_eigenvalue = hermitian_eigenvalues(&m.hermitian_part())?
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    let passes = hermiticity_defect <= tol::HERM && trace_defect <= tol::EQ && min_eigenvalue >= -tol::PSD;
    Ok(StateReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        passes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

/// On-disk state: shape dims plus row-major `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub kind: StateKind,
    pub dims: Vec<usize>,
    pub entries: Vec<[f64; 2]>,
}

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

fn unpairs(p: &[[f64; 2]]) -> Vec<C64> {
    p.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl From<&PureState> for StateFile {
    fn from(psi: &PureState) -> Self {
        Self {
            kind: StateKind::Pure,
            dims: psi.shape.dims().to_vec(),
            entries: pairs(&psi.amplitudes),
        }
    }
}

impl From<&DensityOperator> for StateFile {
    fn from(rho: &DensityOperator) -> Self {
        Self {
            kind: StateKind::Density,
            dims: rho.shape.dims().to_vec(),
            entries: pairs(rho.matrix.as_slice()),
        }
    }
}

impl StateFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn shape(&self) -> Result<SystemShape> {
        SystemShape::new(self.dims.clone())
    }

    /// Raw matrix for linting; no validity checks beyond dimensions.
    pub fn raw_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.shape()?.total_dim();
        let data = unpairs(&self.entries);
        match self.kind {
            StateKind::Pure => {
                if data.len() != d {
                    return Err(Error::Shape(format!("{} amplitudes for dimension {d}", data.len())));
                }
                Ok(ComplexMatrix::outer(&data, &data))
            }
            StateKind::Density => ComplexMatrix::new(d, d, data),
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let shape = self.shape()?;
        match self.kind {
            StateKind::Pure => Ok(pure_to_density(&PureState::new(unpairs(&self.entries), shape)?)),
            StateKind::Density => DensityOperator::new(self.raw_matrix()?, shape),
        }
    }

    pub fn to_pure(&self) -> Result<PureState> {
        match self.kind {
            StateKind::Pure => PureState::new(unpairs(&self.entries), self.shape()?),
            StateKind::Density => Err(Error::InvalidState("file holds a density operator, not a pure state".into())),
        }
    }
}
