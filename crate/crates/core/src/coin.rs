//! Single-qubit coin operators.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

use crate::error::{Result, WalkError};
use crate::mat2::ComplexMatrix2;

/// Euler-angle parameters (α, β, θ) of a coin operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinAngles {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
}

impl CoinAngles {
    pub const fn new(alpha: f64, beta: f64, theta: f64) -> Self {
        Self { alpha, beta, theta }
    }

    /// Coin with phases α = β = 0, keeping only the mixing angle θ.
    pub const fn balanced_phases(theta: f64) -> Self {
        Self::new(0.0, 0.0, theta)
    }
}

/// Unitary coin
///
/// ```text
/// ⎡  e^{i(α+β)} cos θ    e^{i(α−β)} sin θ ⎤
/// ⎣  e^{−i(α−β)} sin θ  −e^{−i(α+β)} cos θ ⎦
/// ```
///
/// with determinant −1. Errors on non-finite angles.
pub fn coin_matrix(angles: CoinAngles) -> Result<ComplexMatrix2> {
    let CoinAngles { alpha, beta, theta } = angles;
    if !(alpha.is_finite() && beta.is_finite() && theta.is_finite()) {
        return Err(WalkError::InvalidArgument(format!(
            "coin angles must be finite, got (α={alpha}, β={beta}, θ={theta})"
        )));
    }
    let (s, c) = theta.sin_cos();
    Ok(ComplexMatrix2::new(
        Complex64::from_polar(c, alpha + beta),
        Complex64::from_polar(s, alpha - beta),
        Complex64::from_polar(s, -(alpha - beta)),
        -Complex64::from_polar(c, -(alpha + beta)),
    ))
}

/// The Hadamard coin, i.e. `coin_matrix` at (0, 0, π/4).
pub fn hadamard_coin() -> ComplexMatrix2 {
    coin_matrix(CoinAngles::new(0.0, 0.0, FRAC_PI_4)).expect("finite angles")
}
