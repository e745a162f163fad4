use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;
use crate::{tol, C64};

fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn from_na(m: &DMatrix<C64>) -> ComplexMatrix {
    let (r, c) = m.shape();
    ComplexMatrix::from_entries(r, c, (0..r * c).map(|k| m[(k / c, k % c)]).collect())
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > tol::HERM {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(h)?;
    let n = h.rows();
    let eig = SymmetricEigen::try_new(to_na(&h.hermitian_part()), f64::EPSILON, 0)
        .ok_or_else(|| Error::Domain("eigendecomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = from_na(&eig.eigenvectors);
    let mut sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, dst)] = vecs[(i, src)];
        }
    }
    Ok((values, sorted))
}

pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(h).map(|(v, _)| v)
}

/// `exp(-i·h·t)` through the eigendecomposition `h = V diag(λ) V†`.
pub fn herm_expm(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("non-finite evolution time {t}")));
    }
    let (values, v) = hermitian_eigen(h)?;
    let n = values.len();
    // V · diag(phases)
    let mut scaled = v.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * t);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    scaled.matmul(&v.adjoint())
}

/// Outcome of a unitarity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitarityCheck {
    pub unitary: bool,
    /// `max |(U†U - I)_ij|`.
    pub deviation: f64,
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> UnitarityCheck {
    if !u.is_square() {
        return UnitarityCheck {
            unitary: false,
            deviation: f64::INFINITY,
        };
    }
    let gram = u.adjoint().mul_unchecked(u);
    let deviation = gram.max_abs_diff(&ComplexMatrix::identity(u.rows()));
    UnitarityCheck {
        unitary: deviation <= tol,
        deviation,
    }
}
