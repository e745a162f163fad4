//! Density-operator laboratory for local-measurement statistics.
//!
//! The crate simulates finite tensor-product quantum systems and checks,
//! numerically and exactly, that a disturbance applied to one part of an
//! entangled system leaves the reduced state of every disjoint part
//! untouched, while deliberately nonlinear "collapse" rules do not.
//!
//! Layout:
//! - [`tensor`]: dense complex matrices, tensor products, embeddings,
//!   partial traces, Hermitian exponentials.
//! - [`state`]: pure and mixed states, canonical entangled states,
//!   seeded random states, validity reports, JSON import/export.
//! - [`channel`]: unitary, Kraus and measurement channels plus the
//!   nonlinear collapse toy.
//! - [`lattice`]: nearest-neighbour chain Hamiltonians, brickwork Trotter
//!   circuits, causal cones and staircase surface states.
//! - [`lab`]: the experiments (no-signaling checks, light-cone sweeps,
//!   CHSH, signaling detection).
//! - [`harness`]: configuration, experiment dispatch and report output
//!   used by the `sepalab` binary.
//!
//! Units are natural (ħ = c = 1) and the basis convention is big-endian:
//! site 0 is the most significant tensor factor.

pub mod channel;
pub mod error;
pub mod harness;
pub mod lab;
pub mod lattice;
pub mod par;
pub mod state;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Hermiticity tolerance for generators and states.
    pub const HERM: f64 = 1e-10;
    /// Unitarity tolerance, max-norm of `U†U - I`.
    pub const UNIT: f64 = 1e-10;
    /// Equality-of-states tolerance in max norm.
    pub const EQ: f64 = 1e-10;
    /// Allowed negative eigenvalue floor of a density operator.
    pub const PSD: f64 = 1e-10;
}

/// Largest total Hilbert-space dimension the dense kernels accept.
pub const MAX_DIM: usize = 4096;

/// Library version recorded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
