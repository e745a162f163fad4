//! Nearest-neighbour chains, brickwork Trotter circuits, causal cones and
//! staircase surface states.
//!
//! Circuit layers alternate parity: layer `ℓ` holds the gates of every bond
//! `(b, b+1)` with `b ≡ ℓ (mod 2)`, each `exp(-i·h_b·dt)`. One even layer
//! followed by one odd layer is a first-order Trotter step of length `dt`.

mod circuit;
mod hamiltonian;
mod surface;

pub use circuit::{build_trotter, causal_cone, restricted_unitary, Gate, TrotterCircuit};
pub use hamiltonian::{evolve_von_neumann, HamiltonianSpec, LatticeHamiltonian, ModelSpec, TermSpec};
pub use surface::{advance_surface, SurfaceState};
