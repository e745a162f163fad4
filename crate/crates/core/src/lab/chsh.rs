use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::DensityOperator;
use crate::tensor::{pauli_x, pauli_z, tensor_product, ComplexMatrix};

/// `(a0, a1, b0, b1)` reaching `2√2` on `Φ⁺`.
pub const OPTIMAL_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4];

/// Correlators in the order `E(a0,b0), E(a0,b1), E(a1,b0), E(a1,b1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub angles: [f64; 4],
    pub correlators: [f64; 4],
    pub s: f64,
    /// `|S| > 2`
    pub exceeds_classical: bool,
    /// `|S| ≤ 2√2 + tolerance`
    pub within_tsirelson: bool,
}

/// `cos θ·Z + sin θ·X`.
fn observable(theta: f64) -> ComplexMatrix {
    pauli_z()
        .scale_real(theta.cos())
        .add(&pauli_x().scale_real(theta.sin()))
        .expect("2x2")
}

/// Exact CHSH value of a two-qubit state; angles are `[a0, a1, b0, b1]`.
pub fn chsh_experiment(rho: &DensityOperator, angles: [f64; 4]) -> Result<ChshResult> {
    if rho.shape().dims() != [2, 2] {
        return Err(Error::Shape(format!(
            "CHSH needs a two-qubit state, got dims {:?}",
            rho.shape().dims()
        )));
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::Domain("non-finite measurement angle".into()));
    }
    let [a0, a1, b0, b1] = angles;
    let e = |a: f64, b: f64| -> Result<f64> {
        Ok(rho.expectation(&tensor_product(&observable(a), &observable(b))?)?.re)
    };
    let correlators = [e(a0, b0)?, e(a0, b1)?, e(a1, b0)?, e(a1, b1)?];
    let s = correlators[0] + correlators[1] + correlators[2] - correlators[3];
    Ok(ChshResult {
        angles,
        correlators,
        s,
        exceeds_classical: s.abs() > 2.0 + 1e-9,
        within_tsirelson: s.abs() <= 2.0 * SQRT_2 + 1e-9,
    })
}
