//! Physical maps on density operators, plus the nonlinear collapse toy.
//!
//! A channel carries an explicit support. Unitary and Kraus channels are
//! validated when applied, not when built, so that broken operator sets can
//! still be inspected with [`validate_channel`].

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::DensityOperator;
use crate::tensor::{conjugate_local, hermitian_eigen, is_unitary, pauli_x, pauli_y, pauli_z, hadamard, ComplexMatrix, SiteSet};
use crate::{tol, C64};

/// Named rules for the deliberately unphysical maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ToyRule {
    /// Project onto the support's likeliest Z outcome and renormalize.
    CollapseToLikeliest,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    Unitary(ComplexMatrix),
    Kraus(Vec<ComplexMatrix>),
    NonlinearToy(ToyRule),
}

/// A map on density operators acting on `support`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    name: String,
    kind: ChannelKind,
    support: SiteSet,
}

fn check_ops(ops: &[ComplexMatrix], support: &SiteSet) -> Result<usize> {
    if support.is_empty() {
        return Err(Error::ChannelValidation("empty support".into()));
    }
    let first = ops
        .first()
        .ok_or_else(|| Error::ChannelValidation("no operators".into()))?;
    let d = first.rows();
    if let Some(bad) = ops.iter().find(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::ChannelValidation(format!(
            "operator is {}x{}, expected {d}x{d}",
            bad.rows(),
            bad.cols()
        )));
    }
    Ok(d)
}

impl Channel {
    pub fn unitary(name: impl Into<String>, u: ComplexMatrix, support: SiteSet) -> Result<Self> {
        check_ops(std::slice::from_ref(&u), &support)?;
        Ok(Self {
            name: name.into(),
            kind: ChannelKind::Unitary(u),
            support,
        })
    }

    pub fn kraus(name: impl Into<String>, ops: Vec<ComplexMatrix>, support: SiteSet) -> Result<Self> {
        check_ops(&ops, &support)?;
        Ok(Self {
            name: name.into(),
            kind: ChannelKind::Kraus(ops),
            support,
        })
    }

    pub fn toy_collapse(site: usize) -> Self {
        Self {
            name: "toy-collapse".into(),
            kind: ChannelKind::NonlinearToy(ToyRule::CollapseToLikeliest),
            support: SiteSet::single(site),
        }
    }

    pub fn identity(site: usize, local_dim: usize) -> Self {
        Self {
            name: "identity".into(),
            kind: ChannelKind::Unitary(ComplexMatrix::identity(local_dim)),
            support: SiteSet::single(site),
        }
    }

    /// Qubit depolarizing channel `{√(1-3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}`.
    pub fn depolarizing(p: f64, site: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ChannelValidation(format!("depolarizing p={p} outside [0, 1]")));
        }
        let (a, b) = ((1.0 - 0.75 * p).sqrt(), (p / 4.0).sqrt());
        Self::kraus(
            format!("depolarizing:{p}"),
            vec![
                ComplexMatrix::identity(2).scale_real(a),
                pauli_x().scale_real(b),
                pauli_y().scale_real(b),
                pauli_z().scale_real(b),
            ],
            SiteSet::single(site),
        )
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64, site: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::ChannelValidation(format!(
                "amplitude-damping gamma={gamma} outside [0, 1]"
            )));
        }
        Self::kraus(
            format!("amplitude-damping:{gamma}"),
            vec![
                ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]),
                ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]),
            ],
            SiteSet::single(site),
        )
    }

    /// Non-selective computational-basis measurement of one site.
    pub fn z_measurement(site: usize, local_dim: usize) -> Result<Self> {
        let mut ch = measurement_channel(z_projectors(local_dim), SiteSet::single(site))?;
        ch.name = "z-measurement".into();
        Ok(ch)
    }

    /// Looks up a built-in qubit channel by id, e.g. `depolarizing:0.3`,
    /// `amplitude-damping:0.5`, `z-measurement`, `toy-collapse`, or one of
    /// the unitaries `identity`, `x`, `y`, `z`, `h`.
    pub fn builtin(id: &str, site: usize) -> Result<Self> {
        let (head, arg) = match id.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (id, None),
        };
        let param = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Config(format!("channel `{head}` needs a parameter, e.g. `{head}:0.5`")))?;
            a.trim()
                .trim_start_matches("p=")
                .trim_start_matches("gamma=")
                .parse()
                .map_err(|_| Error::Config(format!("bad channel parameter `{a}`")))
        };
        let one = SiteSet::single(site);
        let ch = match head.to_ascii_lowercase().as_str() {
            "depolarizing" => Self::depolarizing(param()?, site)?,
            "amplitude-damping" => Self::amplitude_damping(param()?, site)?,
            "z-measurement" => Self::z_measurement(site, 2)?,
            "toy-collapse" => Self::toy_collapse(site),
            "identity" => Self::identity(site, 2),
            "x" => Self::unitary("x", pauli_x(), one)?,
            "y" => Self::unitary("y", pauli_y(), one)?,
            "z" => Self::unitary("z", pauli_z(), one)?,
            "h" => Self::unitary("h", hadamard(), one)?,
            other => return Err(Error::Config(format!("unknown built-in channel `{other}`"))),
        };
        Ok(ch)
    }

    /// Ids accepted by [`Channel::builtin`] that are CPTP, with representative
    /// parameters.
    pub fn builtin_cptp_ids() -> &'static [&'static str] {
        &[
            "identity",
            "x",
            "y",
            "z",
            "h",
            "depolarizing:0.3",
            "depolarizing:1",
            "amplitude-damping:0.3",
            "amplitude-damping:0.5",
            "amplitude-damping:1",
            "z-measurement",
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn support(&self) -> &SiteSet {
        &self.support
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(self.kind, ChannelKind::NonlinearToy(_))
    }

    /// Same channel on a different support of equal dimension.
    pub fn moved_to(&self, support: SiteSet) -> Result<Self> {
        if support.len() != self.support.len() {
            return Err(Error::Shape(format!(
                "cannot move a {}-site channel onto {support}",
                self.support.len()
            )));
        }
        Ok(Self {
            support,
            ..self.clone()
        })
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.support)
    }
}

fn z_projectors(d: usize) -> Vec<ComplexMatrix> {
    (0..d)
        .map(|k| {
            let mut p = ComplexMatrix::zeros(d, d);
            p[(k, k)] = C64::new(1.0, 0.0);
            p
        })
        .collect()
}

/// Applies `ch` to `rho`.
///
/// Unitary: `ŨρŨ†`. Kraus: `Σ_k Ẽ_k ρ Ẽ_k†`. Nonlinear toy: its named rule.
pub fn apply_channel(ch: &Channel, rho: &DensityOperator) -> Result<DensityOperator> {
    let shape = rho.shape();
    shape.check_sites(&ch.support)?;
    if let ChannelKind::NonlinearToy(rule) = ch.kind {
        return match rule {
            ToyRule::CollapseToLikeliest => signaling_toy_map(rho, &ch.support),
        };
    }
    let local = shape.dim_of(&ch.support);
    let ops = match &ch.kind {
        ChannelKind::Unitary(u) => std::slice::from_ref(u),
        ChannelKind::Kraus(ks) => ks.as_slice(),
        ChannelKind::NonlinearToy(_) => unreachable!(),
    };
    if ops[0].rows() != local {
        return Err(Error::Shape(format!(
            "channel operators are {0}x{0} but support {1} has dimension {local}",
            ops[0].rows(),
            ch.support
        )));
    }
    let report = validate_channel(ch);
    if !report.passes {
        return Err(Error::ChannelValidation(format!(
            "{ch}: {} defect {:.3e}",
            report.condition,
            report.defect.unwrap_or(f64::NAN)
        )));
    }
    let mut acc: Option<ComplexMatrix> = None;
    for op in ops {
        let term = conjugate_local(rho.matrix(), op, &ch.support, shape)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(DensityOperator::from_parts(acc.expect("at least one operator"), shape.clone()))
}

/// Kraus channel from a complete set of orthogonal projectors.
pub fn measurement_channel(projectors: Vec<ComplexMatrix>, support: SiteSet) -> Result<Channel> {
    let d = check_ops(&projectors, &support)?;
    for (i, p) in projectors.iter().enumerate() {
        if p.hermiticity_defect() > tol::EQ {
            return Err(Error::ChannelValidation(format!("projector {i} is not Hermitian")));
        }
        if p.matmul(p)?.max_abs_diff(p) > tol::EQ {
            return Err(Error::ChannelValidation(format!("projector {i} is not idempotent")));
        }
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            if p.matmul(q)?.max_abs() > tol::EQ {
                return Err(Error::ChannelValidation(format!("projectors {i} and {j} overlap")));
            }
        }
    }
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &projectors {
        sum = sum.add(p)?;
    }
    let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
    if defect > tol::EQ {
        return Err(Error::ChannelValidation(format!(
            "projectors do not resolve the identity (defect {defect:.3e})"
        )));
    }
    Channel::kraus("projective-measurement", projectors, support)
}

/// Deterministic collapse of one site onto its likeliest Z outcome.
///
/// Ties within [`tol::EQ`] resolve to the lowest outcome. The map is trace
/// preserving but neither linear nor completely positive.
pub fn signaling_toy_map(rho: &DensityOperator, support: &SiteSet) -> Result<DensityOperator> {
    let shape = rho.shape();
    shape.check_sites(support)?;
    if support.len() != 1 {
        return Err(Error::Shape(format!("collapse toy needs a single site, got {support}")));
    }
    let site = support.as_slice()[0];
    let (d, stride) = (shape.dim(site), shape.strides()[site]);
    let digit = |idx: usize| (idx / stride) % d;
    let full = shape.total_dim();

    let mut probs = vec![0.0; d];
    for i in 0..full {
        probs[digit(i)] += rho.matrix()[(i, i)].re;
    }
    let mut best = 0;
    for k in 1..d {
        if probs[k] > probs[best] + tol::EQ {
            best = k;
        }
    }
    let p = probs[best];
    let mut out = ComplexMatrix::zeros(full, full);
    for i in (0..full).filter(|&i| digit(i) == best) {
        for j in (0..full).filter(|&j| digit(j) == best) {
            out[(i, j)] = rho.matrix()[(i, j)] / p;
        }
    }
    Ok(DensityOperator::from_parts(out, shape.clone()))
}

/// Which physical condition a channel was checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelCondition {
    /// `U†U = I`
    Unitarity,
    /// `Σ_k E_k†E_k = I`
    Completeness,
    /// No linear condition applies.
    Nonlinear,
}

impl fmt::Display for ChannelCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Unitarity => "unitarity",
            Self::Completeness => "completeness",
            Self::Nonlinear => "nonlinear",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub condition: ChannelCondition,
    /// Max-norm defect; `None` for the nonlinear toy.
    pub defect: Option<f64>,
    pub passes: bool,
}

pub fn validate_channel(ch: &Channel) -> ChannelReport {
    match &ch.kind {
        ChannelKind::Unitary(u) => {
            let check = is_unitary(u, tol::EQ);
            ChannelReport {
                condition: ChannelCondition::Unitarity,
                defect: Some(check.deviation),
                passes: check.unitary,
            }
        }
        ChannelKind::Kraus(ops) => {
            let d = ops[0].rows();
            let mut sum = ComplexMatrix::zeros(d, d);
            for e in ops {
                sum = sum
                    .add(&e.adjoint().matmul(e).expect("square operators"))
                    .expect("equal sizes");
            }
            let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
            ChannelReport {
                condition: ChannelCondition::Completeness,
                defect: Some(defect),
                passes: defect <= tol::EQ,
            }
        }
        ChannelKind::NonlinearToy(_) => ChannelReport {
            condition: ChannelCondition::Nonlinear,
            defect: None,
            passes: false,
        },
    }
}

/// Haar-random `d×d` unitary from Gram–Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for c in &cols {
                let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(c).for_each(|(x, a)| *x -= proj * a);
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for (i, &z) in c.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Random CPTP Kraus set of `count` operators via a Stinespring isometry
/// `V = G (G†G)^{-1/2}` built from a Gaussian `G`.
pub fn random_kraus<R: Rng + ?Sized>(d: usize, count: usize, rng: &mut R) -> Result<Vec<ComplexMatrix>> {
    if count == 0 {
        return Err(Error::Domain("a Kraus set needs at least one operator".into()));
    }
    let tall = count * d;
    let g = ComplexMatrix::from_entries(
        tall,
        d,
        (0..tall * d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    );
    let gram = g.adjoint().matmul(&g)?.hermitian_part();
    let (vals, vecs) = hermitian_eigen(&gram)?;
    let inv_sqrt: Vec<C64> = vals.iter().map(|&l| C64::new(1.0 / l.sqrt(), 0.0)).collect();
    let root = vecs.matmul(&ComplexMatrix::from_diag(&inv_sqrt))?.matmul(&vecs.adjoint())?;
    let v = g.matmul(&root)?;
    Ok((0..count)
        .map(|k| {
            ComplexMatrix::from_entries(d, d, v.as_slice()[k * d * d..(k + 1) * d * d].to_vec())
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelFileKind {
    Unitary,
    Kraus,
    Builtin,
}

/// On-disk channel description.
///
/// Operators are square matrices given as row-major `(re, im)` pairs; the
/// side length is inferred. Built-ins name an id and a single-site support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub kind: ChannelFileKind,
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

fn square_from_pairs(p: &[[f64; 2]]) -> Result<ComplexMatrix> {
    let n = (p.len() as f64).sqrt().round() as usize;
    if n * n != p.len() {
        return Err(Error::Shape(format!("{} entries do not form a square matrix", p.len())));
    }
    ComplexMatrix::new(n, n, p.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

impl ChannelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_channel(&self) -> Result<Channel> {
        let support = SiteSet::new(self.support.iter().copied())?;
        let ops = || -> Result<Vec<ComplexMatrix>> { self.operators.iter().map(|p| square_from_pairs(p)).collect() };
        let name = self.id.clone().unwrap_or_else(|| format!("{:?}", self.kind).to_lowercase());
        match self.kind {
            ChannelFileKind::Unitary => {
                let mut ops = ops()?;
                if ops.len() != 1 {
                    return Err(Error::ChannelValidation(format!(
                        "a unitary channel takes one operator, got {}",
                        ops.len()
                    )));
                }
                Channel::unitary(name, ops.remove(0), support)
            }
            ChannelFileKind::Kraus => Channel::kraus(name, ops()?, support),
            ChannelFileKind::Builtin => {
                let id = self
                    .id
                    .as_deref()
                    .ok_or_else(|| Error::Config("built-in channel needs an `id`".into()))?;
                if support.len() != 1 {
                    return Err(Error::Config("built-in channels act on one site".into()));
                }
                Channel::builtin(id, support.as_slice()[0])
            }
        }
    }
}

impl From<&Channel> for ChannelFile {
    fn from(ch: &Channel) -> Self {
        let pairs = |m: &ComplexMatrix| m.as_slice().iter().map(|z| [z.re, z.im]).collect();
        let (kind, operators) = match &ch.kind {
            ChannelKind::Unitary(u) => (ChannelFileKind::Unitary, vec![pairs(u)]),
            ChannelKind::Kraus(ks) => (ChannelFileKind::Kraus, ks.iter().map(pairs).collect()),
            ChannelKind::NonlinearToy(_) => (ChannelFileKind::Builtin, Vec::new()),
        };
        Self {
            kind,
            support: ch.support.as_slice().to_vec(),
            operators,
            id: Some(ch.name.clone()),
        }
    }
}
