//! 2×2 complex matrices.
//!
//! Everything in this crate lives in a two-dimensional internal space: coin
//! operators, one-step Bloch matrices, reduced density matrices. A dedicated
//! 2×2 type with closed-form algebra (products, adjoints, Hermitian
//! eigenvalues by trace/determinant) is both faster and easier to audit than
//! a general linear-algebra dependency.

use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Absolute tolerance for algebraic identities (unitarity, determinant).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Absolute tolerance for density-matrix validation (trace, positivity,
/// Hermiticity). Looser than [`ALGEBRA_TOL`]: density matrices are
/// accumulated over many amplitudes, so they carry more rounding noise.
pub const DENSITY_TOL: f64 = 1e-9;

/// Dense 2×2 complex matrix, row-major fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl ComplexMatrix2 {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    /// Projector |v⟩⟨v| onto a (not necessarily normalized) spinor.
    pub fn outer(v: [Complex64; 2]) -> Self {
        Self::new(
            v[0] * v[0].conj(),
            v[0] * v[1].conj(),
            v[1] * v[0].conj(),
            v[1] * v[1].conj(),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }

    /// Matrix-vector product on a spinor (component 0 = spin +1).
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.a11.conj(),
            self.a21.conj(),
            self.a12.conj(),
            self.a22.conj(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let d = self.sub(rhs);
        d.a11
            .norm()
            .max(d.a12.norm())
            .max(d.a21.norm())
            .max(d.a22.norm())
    }

    /// ‖M†M − I‖_max; zero for unitary matrices.
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Self::identity())
    }

    /// ‖M − M†‖_max; zero for Hermitian matrices.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of a Hermitian matrix, ascending. Closed form via
    /// trace/determinant; the caller guarantees Hermiticity (the imaginary
    /// parts of the diagonal and the asymmetry of the off-diagonal are
    /// ignored up to averaging).
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let a = self.a11.re;
        let d = self.a22.re;
        // For a Hermitian matrix a12 = conj(a21); average to shed noise.
        let b = (self.a12 + self.a21.conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let disc = (0.5 * (a - d)).powi(2) + b.norm_sqr();
        let r = disc.max(0.0).sqrt();
        (mean - r, mean + r)
    }
}

impl std::ops::Mul for ComplexMatrix2 {
    type Output = ComplexMatrix2;
    fn mul(self, rhs: ComplexMatrix2) -> ComplexMatrix2 {
        ComplexMatrix2::mul(&self, &rhs)
    }
}

/// Von Neumann entropy −Σ λ log₂ λ of a 2×2 density matrix, in bits.
///
/// The eigenvalue convention 0·log₂0 ≡ 0 applies; eigenvalues in
/// [−1e−9, 0) are treated as rounding noise and clamped to 0, and the
/// result is clamped into [0, 1] (the achievable range for one qubit).
pub fn von_neumann_entropy(rho: &ComplexMatrix2) -> Result<f64> {
    let herm = rho.hermiticity_error();
    if !herm.is_finite() || herm > DENSITY_TOL {
        return Err(WalkError::InvalidDensityMatrix(format!(
            "not Hermitian: ‖ρ−ρ†‖ = {herm:.3e}"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(WalkError::InvalidDensityMatrix(format!(
            "trace = {tr} instead of 1"
        )));
    }
    let (lo, hi) = rho.hermitian_eigenvalues();
    if lo < -DENSITY_TOL {
        return Err(WalkError::InvalidDensityMatrix(format!(
            "negative eigenvalue {lo:.3e}"
        )));
    }
    let mut s = 0.0;
    for lambda in [lo, hi] {
        let l = lambda.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.clamp(0.0, 1.0))
}
