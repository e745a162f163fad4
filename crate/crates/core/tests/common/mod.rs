#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepalab::tensor::ComplexMatrix;
use sepalab::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng>(n: usize, m: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..n * m)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_entries(n, m, data)
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, n, rng).hermitian_part()
}

pub fn random_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Every subset of `0..n`, as sorted site lists.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|s| mask & (1 << s) != 0).collect())
        .collect()
}
