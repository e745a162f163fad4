//! Dense complex linear algebra on tensor-product spaces.

mod expm;
mod matrix;
mod ops;
mod shape;

pub use expm::{hermitian_eigen, hermitian_eigenvalues, herm_expm, is_unitary, UnitarityCheck};
pub use matrix::ComplexMatrix;
pub use ops::{conjugate_local, embed_local, partial_trace, tensor_product};
pub use shape::{SiteSet, SystemShape};

use crate::C64;

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Pauli Y.
pub fn pauli_y() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::from_entries(2, 2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])
}

/// Pauli Z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// Hadamard.
pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[s, s, s, -s])
}
