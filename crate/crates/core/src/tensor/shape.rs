use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_DIM;

/// Tensor factorization of a finite Hilbert space.
///
/// Site 0 is the most significant factor: basis labels `(n_0, …, n_{k-1})`
/// map to the composite index `Σ_i n_i · Π_{j>i} d_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SystemShape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl SystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("a system needs at least one site".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Shape(format!("local dimension {d} is below 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = match total.checked_mul(d) {
                Some(t) if t <= MAX_DIM => t,
                _ => {
                    return Err(Error::Capacity {
                        requested: total.saturating_mul(d),
                        cap: MAX_DIM,
                    })
                }
            };
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self {
            dims,
            strides,
            total,
        })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    /// `Π_{j>i} d_j` for each site `i`.
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Product of the local dimensions over `sites`.
    pub fn dim_of(&self, sites: &SiteSet) -> usize {
        sites.iter().map(|s| self.dims[s]).product()
    }

    pub fn check_sites(&self, sites: &SiteSet) -> Result<()> {
        match sites.iter().find(|&s| s >= self.n_sites()) {
            Some(s) => Err(Error::Shape(format!(
                "site {s} out of range for a {}-site system",
                self.n_sites()
            ))),
            None => Ok(()),
        }
    }

    /// Full-space offsets of every composite index over `sites`.
    ///
    /// Entry `a` is `Σ_{i∈sites} n_i(a) · stride_i`, where `n_i(a)` are the
    /// big-endian digits of `a` over the sub-factorization. Any full index is
    /// `offsets(S)[a] + offsets(complement S)[e]` for a unique `(a, e)`.
    pub(crate) fn offsets(&self, sites: &SiteSet) -> Vec<usize> {
        let mut offs = vec![0usize];
        for s in sites.iter() {
            let (d, stride) = (self.dims[s], self.strides[s]);
            offs = offs
                .iter()
                .flat_map(|&o| (0..d).map(move |n| o + n * stride))
                .collect();
        }
        offs
    }

    pub fn all_sites(&self) -> SiteSet {
        SiteSet::range(0, self.n_sites())
    }
}

impl TryFrom<Vec<usize>> for SystemShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<SystemShape> for Vec<usize> {
    fn from(shape: SystemShape) -> Self {
        shape.dims
    }
}

/// Sorted set of distinct site indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SiteSet(Vec<usize>);

impl SiteSet {
    /// Rejects duplicate sites.
    pub fn new(sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = sites.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Shape(format!("duplicate site in {v:?}")));
        }
        Ok(Self(v))
    }

    pub fn single(site: usize) -> Self {
        Self(vec![site])
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `start..end`.
    pub fn range(start: usize, end: usize) -> Self {
        Self((start..end).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_disjoint(&self, other: &SiteSet) -> bool {
        self.iter().all(|s| !other.contains(s))
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    pub fn union(&self, other: &SiteSet) -> SiteSet {
        let mut v = self.0.clone();
        v.extend(other.iter().filter(|&s| !self.contains(s)));
        v.sort_unstable();
        SiteSet(v)
    }

    /// Sites of `0..n_sites` not in `self`.
    pub fn complement(&self, n_sites: usize) -> SiteSet {
        SiteSet((0..n_sites).filter(|&s| !self.contains(s)).collect())
    }
}

impl TryFrom<Vec<usize>> for SiteSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SiteSet> for Vec<usize> {
    fn from(s: SiteSet) -> Self {
        s.0
    }
}

impl fmt::Display for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}
