use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::DensityOperator;
use crate::tensor::{embed_local, herm_expm, pauli_x, pauli_y, pauli_z, tensor_product, ComplexMatrix, SiteSet, SystemShape};
use crate::{tol, C64};

/// Open-chain Hamiltonian built from bond terms `(i, i+1)` and on-site terms.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeHamiltonian {
    shape: SystemShape,
    local_dim: usize,
    bonds: Vec<(usize, ComplexMatrix)>,
    onsite: Vec<(usize, ComplexMatrix)>,
}

fn check_term(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::Shape(format!(
            "term is {}x{}, expected {dim}x{dim}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > tol::HERM {
        return Err(Error::Domain(format!("term is not Hermitian (defect {defect:.3e})")));
    }
    Ok(())
}

impl LatticeHamiltonian {
    /// A chain with no terms.
    pub fn new(n_sites: usize, local_dim: usize) -> Result<Self> {
        Ok(Self {
            shape: SystemShape::new(vec![local_dim; n_sites])?,
            local_dim,
            bonds: Vec::new(),
            onsite: Vec::new(),
        })
    }

    /// Adds a Hermitian `d²×d²` term on bond `(site, site+1)`.
    pub fn add_bond(&mut self, site: usize, term: ComplexMatrix) -> Result<&mut Self> {
        if site + 1 >= self.n_sites() {
            return Err(Error::Shape(format!(
                "bond ({site}, {}) is not on a {}-site chain",
                site + 1,
                self.n_sites()
            )));
        }
        check_term(&term, self.local_dim * self.local_dim)?;
        self.bonds.push((site, term));
        Ok(self)
    }

    pub fn add_onsite(&mut self, site: usize, term: ComplexMatrix) -> Result<&mut Self> {
        if site >= self.n_sites() {
            return Err(Error::Shape(format!("site {site} is not on a {}-site chain", self.n_sites())));
        }
        check_term(&term, self.local_dim)?;
        self.onsite.push((site, term));
        Ok(self)
    }

    /// `H = -J Σ Z_i Z_{i+1} - g Σ X_i`.
    pub fn ising(n_sites: usize, j: f64, g: f64) -> Result<Self> {
        let mut h = Self::new(n_sites, 2)?;
        let zz = tensor_product(&pauli_z(), &pauli_z())?.scale_real(-j);
        for b in 0..n_sites.saturating_sub(1) {
            h.add_bond(b, zz.clone())?;
        }
        for s in 0..n_sites {
            h.add_onsite(s, pauli_x().scale_real(-g))?;
        }
        Ok(h)
    }

    /// `H = J Σ (X X + Y Y + Z Z)`.
    pub fn heisenberg(n_sites: usize, j: f64) -> Result<Self> {
        let mut h = Self::new(n_sites, 2)?;
        let xx = tensor_product(&pauli_x(), &pauli_x())?;
        let yy = tensor_product(&pauli_y(), &pauli_y())?;
        let zz = tensor_product(&pauli_z(), &pauli_z())?;
        let term = xx.add(&yy)?.add(&zz)?.scale_real(j);
        for b in 0..n_sites.saturating_sub(1) {
            h.add_bond(b, term.clone())?;
        }
        Ok(h)
    }

    pub fn n_sites(&self) -> usize {
        self.shape.n_sites()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn bonds(&self) -> &[(usize, ComplexMatrix)] {
        &self.bonds
    }

    pub fn onsite(&self) -> &[(usize, ComplexMatrix)] {
        &self.onsite
    }

    /// Full-space Hamiltonian `Σ` of all embedded terms.
    pub fn total(&self) -> Result<ComplexMatrix> {
        let d = self.shape.total_dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (b, m) in &self.bonds {
            acc = acc.add(&embed_local(m, &SiteSet::range(*b, b + 2), &self.shape)?)?;
        }
        for (s, m) in &self.onsite {
            acc = acc.add(&embed_local(m, &SiteSet::single(*s), &self.shape)?)?;
        }
        Ok(acc)
    }

    /// Per-bond generators with on-site terms folded in.
    ///
    /// An on-site term is split evenly over the bonds touching its site, so
    /// the generators sum to [`LatticeHamiltonian::total`]. On a single-site
    /// chain the lone entry is the on-site generator.
    pub fn bond_generators(&self) -> Result<Vec<ComplexMatrix>> {
        let n = self.n_sites();
        let d = self.local_dim;
        if n == 1 {
            let mut acc = ComplexMatrix::zeros(d, d);
            for (_, m) in &self.onsite {
                acc = acc.add(m)?;
            }
            return Ok(vec![acc]);
        }
        let id = ComplexMatrix::identity(d);
        let mut gens = vec![ComplexMatrix::zeros(d * d, d * d); n - 1];
        for (b, m) in &self.bonds {
            gens[*b] = gens[*b].add(m)?;
        }
        for (s, m) in &self.onsite {
            let touching: Vec<usize> = [s.checked_sub(1), Some(*s).filter(|&b| b + 1 < n)]
                .into_iter()
                .flatten()
                .collect();
            let w = 1.0 / touching.len() as f64;
            for b in touching {
                // site s is the left factor of bond s and the right factor of bond s-1
                let lifted = if b == *s {
                    tensor_product(m, &id)?
                } else {
                    tensor_product(&id, m)?
                };
                gens[b] = gens[b].add(&lifted.scale_real(w))?;
            }
        }
        Ok(gens)
    }
}

/// Exact `ρ ↦ UρU†` with `U = exp(-i·H·t)`.
pub fn evolve_von_neumann(rho: &DensityOperator, h: &LatticeHamiltonian, t: f64) -> Result<DensityOperator> {
    if rho.shape() != h.shape() {
        return Err(Error::Shape(format!(
            "state dims {:?} vs Hamiltonian dims {:?}",
            rho.shape().dims(),
            h.shape().dims()
        )));
    }
    let u = herm_expm(&h.total()?, t)?;
    let out = u.matmul(rho.matrix())?.matmul(&u.adjoint())?;
    Ok(DensityOperator::from_parts(out, rho.shape().clone()))
}

/// Named model with parameters, e.g. `ising:J=1,g=1` or `heisenberg:J=0.5`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn ising(j: f64, g: f64) -> Self {
        Self {
            model: "ising".into(),
            params: [("J".to_string(), j), ("g".to_string(), g)].into(),
        }
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn build(&self, n_sites: usize) -> Result<LatticeHamiltonian> {
        match self.model.to_ascii_lowercase().as_str() {
            "ising" => LatticeHamiltonian::ising(n_sites, self.param("J", 1.0), self.param("g", 1.0)),
            "heisenberg" => LatticeHamiltonian::heisenberg(n_sites, self.param("J", 1.0)),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected ising or heisenberg)"
            ))),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (model, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("model parameter `{kv}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("model parameter `{kv}` is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(Self {
            model: model.trim().to_string(),
            params,
        })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.model)?;
        for (k, (name, v)) in self.params.iter().enumerate() {
            write!(f, "{}{name}={v}", if k == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// Explicit term: a site (left site for bonds) and row-major `(re, im)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub site: usize,
    pub entries: Vec<[f64; 2]>,
}

/// Hamiltonian description read from JSON or TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n_sites: usize,
    #[serde(default = "default_local_dim")]
    pub local_dim: usize,
    /// `ising`, `heisenberg` or `custom`.
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub bonds: Vec<TermSpec>,
    #[serde(default)]
    pub onsite: Vec<TermSpec>,
}

fn default_local_dim() -> usize {
    2
}

impl HamiltonianSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<LatticeHamiltonian> {
        if self.model.eq_ignore_ascii_case("custom") {
            let mut h = LatticeHamiltonian::new(self.n_sites, self.local_dim)?;
            let mat = |t: &TermSpec, dim: usize| {
                ComplexMatrix::new(dim, dim, t.entries.iter().map(|&[re, im]| C64::new(re, im)).collect())
            };
            for t in &self.bonds {
                h.add_bond(t.site, mat(t, self.local_dim * self.local_dim)?)?;
            }
            for t in &self.onsite {
                h.add_onsite(t.site, mat(t, self.local_dim)?)?;
            }
            return Ok(h);
        }
        if self.local_dim != 2 {
            return Err(Error::Config(format!("model `{}` is defined for qubits only", self.model)));
        }
        ModelSpec {
            model: self.model.clone(),
            params: self.params.clone(),
        }
        .build(self.n_sites)
    }
}
