use crate::error::{Error, Result};
use crate::par::for_each_row;
use crate::tensor::{ComplexMatrix, SiteSet, SystemShape};
use crate::{C64, MAX_DIM};

/// Kronecker product `a ⊗ b`, with `a` as the more significant factor.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = checked_dim(a.rows(), b.rows())?;
    let cols = checked_dim(a.cols(), b.cols())?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (br, bc) = (b.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a[(i, j)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = x * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

fn checked_dim(x: usize, y: usize) -> Result<usize> {
    match x.checked_mul(y) {
        Some(d) if d <= MAX_DIM => Ok(d),
        _ => Err(Error::Capacity {
            requested: x.saturating_mul(y),
            cap: MAX_DIM,
        }),
    }
}

fn check_square(m: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::Shape(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Traces out every site not in `keep`.
///
/// The result acts on the kept sites in ascending order. An empty `keep`
/// yields the 1×1 matrix `[Tr ρ]`.
pub fn partial_trace(rho: &ComplexMatrix, shape: &SystemShape, keep: &SiteSet) -> Result<ComplexMatrix> {
    check_square(rho, shape.total_dim(), "operator")?;
    shape.check_sites(keep)?;
    let traced = keep.complement(shape.n_sites());
    let kept_offs = shape.offsets(keep);
    let traced_offs = shape.offsets(&traced);
    let n = kept_offs.len();
    let full = shape.total_dim();
    let data = rho.as_slice();

    let mut out = ComplexMatrix::zeros(n, n).into_vec();
    for_each_row(&mut out, n, |i, row| {
        for (j, o) in row.iter_mut().enumerate() {
            *o = traced_offs
                .iter()
                .map(|&t| data[(kept_offs[i] + t) * full + kept_offs[j] + t])
                .sum();
        }
    });
    Ok(ComplexMatrix::from_entries(n, n, out))
}

/// Lifts `op`, acting on `support` (ascending site order), to the full space
/// with identity on every other site.
pub fn embed_local(op: &ComplexMatrix, support: &SiteSet, shape: &SystemShape) -> Result<ComplexMatrix> {
    shape.check_sites(support)?;
    check_square(op, shape.dim_of(support), "local operator")?;
    let sup = shape.offsets(support);
    let env = shape.offsets(&support.complement(shape.n_sites()));
    let mut out = ComplexMatrix::zeros(shape.total_dim(), shape.total_dim());
    for &e in &env {
        for (a, &ra) in sup.iter().enumerate() {
            for (b, &cb) in sup.iter().enumerate() {
                out[(ra + e, cb + e)] = op[(a, b)];
            }
        }
    }
    Ok(out)
}

/// `Õ ρ Õ†` with `Õ = embed_local(op, support, shape)`, without forming `Õ`.
///
/// Cost is `O(d_S · D²)` instead of the `O(D³)` of two dense products.
pub fn conjugate_local(
    rho: &ComplexMatrix,
    op: &ComplexMatrix,
    support: &SiteSet,
    shape: &SystemShape,
) -> Result<ComplexMatrix> {
    let full = shape.total_dim();
    check_square(rho, full, "operator")?;
    shape.check_sites(support)?;
    check_square(op, shape.dim_of(support), "local operator")?;

    let sup = shape.offsets(support);
    let env = shape.offsets(&support.complement(shape.n_sites()));
    // full index -> (local index, environment offset)
    let mut split = vec![(0usize, 0usize); full];
    for &e in &env {
        for (a, &o) in sup.iter().enumerate() {
            split[o + e] = (a, e);
        }
    }

    // left: (Õρ)[r, :] = Σ_b op[a, b] ρ[sup[b] + e, :]
    let src = rho.as_slice();
    let mut left = vec![C64::new(0.0, 0.0); full * full];
    for_each_row(&mut left, full, |r, row| {
        let (a, e) = split[r];
        for (b, &ob) in sup.iter().enumerate() {
            let w = op[(a, b)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let from = &src[(ob + e) * full..(ob + e + 1) * full];
            for (o, &x) in row.iter_mut().zip(from) {
                *o += w * x;
            }
        }
    });

    // right: (MÕ†)[:, c] = Σ_b M[:, sup[b] + e] conj(op[a, b])
    let mut out = vec![C64::new(0.0, 0.0); full * full];
    for_each_row(&mut out, full, |r, row| {
        let m = &left[r * full..(r + 1) * full];
        for (c, o) in row.iter_mut().enumerate() {
            let (a, e) = split[c];
            *o = sup
                .iter()
                .enumerate()
                .map(|(b, &ob)| m[ob + e] * op[(a, b)].conj())
                .sum();
        }
    });
    Ok(ComplexMatrix::from_entries(full, full, out))
}
