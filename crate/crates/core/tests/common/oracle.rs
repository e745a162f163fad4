//! Brute-force reference implementations.
//!
//! Nothing here calls into the library's numerical kernels: matrices are
//! plain `Vec<Vec<Complex64>>`, every operation is an explicit index loop,
//! and the exponential is a Taylor series with scaling and squaring. The
//! only shared vocabulary is `Complex64` and the conversion functions at the
//! bottom of the file. Every routine refuses total dimension above
//! [`ORACLE_CAP`].

use num_complex::Complex64;
use sepalab::tensor::ComplexMatrix;

pub type Mat = Vec<Vec<Complex64>>;

pub const ORACLE_CAP: usize = 256;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, PartialEq)]
pub struct OracleCapacity(pub usize);

fn check_cap(dim: usize) -> Result<(), OracleCapacity> {
    if dim > ORACLE_CAP {
        Err(OracleCapacity(dim))
    } else {
        Ok(())
    }
}

pub fn total(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Big-endian digits of a composite index.
pub fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

pub fn undigits(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![ZERO; c]; r]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    let mut c = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            if x == ZERO {
                continue;
            }
            for j in 0..m {
                c[i][j] += x * b[l][j];
            }
        }
    }
    c
}

pub fn dagger(a: &Mat) -> Mat {
    let mut out = zeros(a[0].len(), a.len());
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = v.conj();
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Mat, s: Complex64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    let mut m: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            m = m.max((x - y).norm());
        }
    }
    m
}

pub fn trace(a: &Mat) -> Complex64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

/// `ρ ↦ U ρ U†`, computed as `U (U ρ†)†` so that `U` is always the left
/// factor.
pub fn conjugate(u: &Mat, rho: &Mat) -> Mat {
    mul(u, &dagger(&mul(u, &dagger(rho))))
}

/// Sums `ρ[i][j]` over every pair whose traced-out digits coincide.
pub fn oracle_partial_trace(rho: &Mat, dims: &[usize], keep: &[usize]) -> Result<Mat, OracleCapacity> {
    let d = total(dims);
    check_cap(d)?;
    assert_eq!(rho.len(), d);
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let dk = total(&kept_dims);
    let mut out = zeros(dk, dk);
    for i in 0..d {
        let di = digits(i, dims);
        for j in 0..d {
            let dj = digits(j, dims);
            let traced_equal = (0..dims.len())
                .filter(|s| !keep.contains(s))
                .all(|s| di[s] == dj[s]);
            if !traced_equal {
                continue;
            }
            let ki: Vec<usize> = keep.iter().map(|&s| di[s]).collect();
            let kj: Vec<usize> = keep.iter().map(|&s| dj[s]).collect();
            out[undigits(&ki, &kept_dims)][undigits(&kj, &kept_dims)] += rho[i][j];
        }
    }
    Ok(out)
}

/// `(A⊗B)[(i,k),(j,l)] = A[i][j]·B[k][l]`, one entry at a time.
pub fn oracle_kron(a: &Mat, b: &Mat) -> Result<Mat, OracleCapacity> {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    check_cap(ra * rb)?;
    check_cap(ca * cb)?;
    let mut out = zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    Ok(out)
}

/// Permutation matrix sending the basis of `dims` (original site order) to
/// the basis where the sites appear in `order`.
pub fn site_permutation(dims: &[usize], order: &[usize]) -> Mat {
    let d = total(dims);
    let new_dims: Vec<usize> = order.iter().map(|&s| dims[s]).collect();
    let mut p = zeros(d, d);
    for i in 0..d {
        let di = digits(i, dims);
        let moved: Vec<usize> = order.iter().map(|&s| di[s]).collect();
        p[undigits(&moved, &new_dims)][i] = ONE;
    }
    p
}

/// Moves `support` to the front, applies `op ⊗ I`, and moves it back.
pub fn oracle_embed(op: &Mat, support: &[usize], dims: &[usize]) -> Result<Mat, OracleCapacity> {
    let d = total(dims);
    check_cap(d)?;
    let rest: Vec<usize> = (0..dims.len()).filter(|s| !support.contains(s)).collect();
    let order: Vec<usize> = support.iter().chain(&rest).copied().collect();
    let rest_dim: usize = rest.iter().map(|&s| dims[s]).product();
    let p = site_permutation(dims, &order);
    let block = oracle_kron(op, &eye(rest_dim))?;
    Ok(mul(&dagger(&p), &mul(&block, &p)))
}

fn one_norm(a: &Mat) -> f64 {
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(−i·h·t)` by scaling, a 40-term Taylor series, and squaring.
pub fn oracle_expm(h: &Mat, t: f64) -> Result<Mat, OracleCapacity> {
    let n = h.len();
    check_cap(n)?;
    let a = scale(h, Complex64::new(0.0, -t));
    let norm = one_norm(&a);
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.25 {
        squarings += 1;
    }
    let a = scale(&a, Complex64::new(1.0 / 2f64.powi(squarings as i32), 0.0));
    let mut sum = eye(n);
    let mut term = eye(n);
    for k in 1..=40 {
        term = scale(&mul(&term, &a), Complex64::new(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    Ok(sum)
}

/// Exact `U ρ U†` with `U = exp(−i·h·t)`.
pub fn oracle_exact_evolve(rho: &Mat, h: &Mat, t: f64) -> Result<Mat, OracleCapacity> {
    let u = oracle_expm(h, t)?;
    Ok(conjugate(&u, rho))
}

/// Sites of the gates in brickwork layer `layer` of an `n`-site open chain:
/// bonds `(b, b+1)` with `b ≡ layer (mod 2)`; a lone site forms its own gate
/// on even layers.
pub fn brickwork_layer(n: usize, layer: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return if layer % 2 == 0 { vec![vec![0]] } else { vec![] };
    }
    (0..n - 1)
        .filter(|b| b % 2 == layer % 2)
        .map(|b| vec![b, b + 1])
        .collect()
}

/// Breadth-first search over `(site, time)` nodes: every node reaches its
/// own site one step later, and every other site of the gate it sits in.
pub fn oracle_reachability_cone(n: usize, origin: usize, layers: usize) -> Vec<usize> {
    let mut seen = vec![vec![false; n]; layers + 1];
    let mut queue = std::collections::VecDeque::new();
    seen[0][origin] = true;
    queue.push_back((origin, 0usize));
    while let Some((s, t)) = queue.pop_front() {
        if t == layers {
            continue;
        }
        let mut next = vec![s];
        for gate in brickwork_layer(n, t) {
            if gate.contains(&s) {
                next.extend(gate);
            }
        }
        for s2 in next {
            if !seen[t + 1][s2] {
                seen[t + 1][s2] = true;
                queue.push_back((s2, t + 1));
            }
        }
    }
    (0..n).filter(|&s| seen[layers][s]).collect()
}

/// One gate of a circuit, as the oracle sees it.
#[derive(Clone, Debug)]
pub struct OracleGate {
    pub layer: usize,
    pub sites: Vec<usize>,
    /// Full-space matrix.
    pub full: Mat,
}

/// `before[g]` lists the gates that must be absorbed before gate `g`:
/// those in an earlier layer sharing a site with it, closed transitively.
pub fn precedence(gates: &[OracleGate]) -> Vec<Vec<usize>> {
    let n = gates.len();
    let mut before = vec![vec![false; n]; n];
    for g in 0..n {
        for h in 0..n {
            if gates[h].layer < gates[g].layer && gates[h].sites.iter().any(|s| gates[g].sites.contains(s)) {
                before[g][h] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if before[i][k] && before[k][j] {
                    before[i][j] = true;
                }
            }
        }
    }
    before
        .into_iter()
        .map(|row| (0..n).filter(|&h| row[h]).collect())
        .collect()
}

/// Every downward-closed subset of gates, as bitmasks.
pub fn downward_closed_sets(gates: &[OracleGate]) -> Vec<u64> {
    let before = precedence(gates);
    let n = gates.len();
    assert!(n < 64);
    (0u64..(1 << n))
        .filter(|mask| {
            (0..n)
                .filter(|g| mask & (1 << g) != 0)
                .all(|g| before[g].iter().all(|&h| mask & (1 << h) != 0))
        })
        .collect()
}

/// Outcome of absorbing one cut's gates in every admissible order.
#[derive(Debug)]
pub struct OrderingOutcome {
    pub orderings: usize,
    /// Largest max-norm distance from the first ordering's state.
    pub spread: f64,
    pub state: Mat,
}

/// Applies the gates in `mask` to `rho` in every topological order.
pub fn oracle_all_orderings(rho: &Mat, gates: &[OracleGate], mask: u64) -> Result<OrderingOutcome, OracleCapacity> {
    check_cap(rho.len())?;
    let before = precedence(gates);
    let mut out = OrderingOutcome {
        orderings: 0,
        spread: 0.0,
        state: rho.clone(),
    };
    let mut first: Option<Mat> = None;
    walk(rho, gates, &before, mask, 0, &mut first, &mut out);
    out.state = first.expect("at least one ordering");
    Ok(out)
}

fn walk(
    rho: &Mat,
    gates: &[OracleGate],
    before: &[Vec<usize>],
    mask: u64,
    done: u64,
    first: &mut Option<Mat>,
    out: &mut OrderingOutcome,
) {
    if done == mask {
        out.orderings += 1;
        match first {
            None => *first = Some(rho.clone()),
            Some(f) => out.spread = out.spread.max(max_diff(f, rho)),
        }
        return;
    }
    for g in 0..gates.len() {
        let bit = 1u64 << g;
        if mask & bit == 0 || done & bit != 0 {
            continue;
        }
        if before[g].iter().all(|&h| done & (1 << h) != 0) {
            let next = conjugate(&gates[g].full, rho);
            walk(&next, gates, before, mask, done | bit, first, out);
        }
    }
}

pub fn pauli(which: char) -> Mat {
    let i = Complex64::new(0.0, 1.0);
    match which {
        'I' => eye(2),
        'X' => vec![vec![ZERO, ONE], vec![ONE, ZERO]],
        'Y' => vec![vec![ZERO, -i], vec![i, ZERO]],
        'Z' => vec![vec![ONE, ZERO], vec![ZERO, -ONE]],
        _ => panic!("unknown Pauli {which}"),
    }
}

/// Bond generator of the open transverse-field Ising chain
/// `−J Σ Z Z − g Σ X`, with each site's field shared equally among the
/// bonds touching it.
pub fn ising_bond(n: usize, b: usize, j: f64, g: f64) -> Mat {
    let zz = oracle_kron(&pauli('Z'), &pauli('Z')).unwrap();
    let xi = oracle_kron(&pauli('X'), &pauli('I')).unwrap();
    let ix = oracle_kron(&pauli('I'), &pauli('X')).unwrap();
    let share = |s: usize| if s == 0 || s == n - 1 { 1.0 } else { 0.5 };
    let mut h = scale(&zz, Complex64::new(-j, 0.0));
    h = add(&h, &scale(&xi, Complex64::new(-g * share(b), 0.0)));
    add(&h, &scale(&ix, Complex64::new(-g * share(b + 1), 0.0)))
}

/// Full-space Ising Hamiltonian, term by term.
pub fn ising_total(n: usize, j: f64, g: f64) -> Mat {
    let dims = vec![2; n];
    let mut h = zeros(1 << n, 1 << n);
    let zz = oracle_kron(&pauli('Z'), &pauli('Z')).unwrap();
    for b in 0..n - 1 {
        h = add(&h, &scale(&oracle_embed(&zz, &[b, b + 1], &dims).unwrap(), Complex64::new(-j, 0.0)));
    }
    for s in 0..n {
        h = add(&h, &scale(&oracle_embed(&pauli('X'), &[s], &dims).unwrap(), Complex64::new(-g, 0.0)));
    }
    h
}

/// The Ising brickwork circuit, built gate by gate from the oracle's own
/// bond generators and exponential.
pub fn ising_circuit(n: usize, j: f64, g: f64, dt: f64, depth: usize) -> Vec<OracleGate> {
    let dims = vec![2; n];
    let mut gates = Vec::new();
    for layer in 0..depth {
        for sites in brickwork_layer(n, layer) {
            let local = oracle_expm(&ising_bond(n, sites[0], j, g), dt).unwrap();
            gates.push(OracleGate {
                layer,
                full: oracle_embed(&local, &sites, &dims).unwrap(),
                sites,
            });
        }
    }
    gates
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(psi: &[Complex64]) -> Mat {
    psi.iter()
        .map(|a| psi.iter().map(|b| a * b.conj()).collect())
        .collect()
}

pub fn to_oracle(m: &ComplexMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn from_oracle(m: &Mat) -> ComplexMatrix {
    ComplexMatrix::from_entries(m.len(), m[0].len(), m.iter().flatten().copied().collect())
}

/// Max-norm distance between a library matrix and an oracle matrix.
pub fn gap(fast: &ComplexMatrix, oracle: &Mat) -> f64 {
    max_diff(&to_oracle(fast), oracle)
}
