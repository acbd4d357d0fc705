//! Coin-position entanglement: reduced density matrices of evolving states,
//! entropy time series, and the closed-form long-time averages for localized
//! Bloch-spinor starts, at finite circumference and in the infinite limit.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::coin::CoinAngles;
use crate::error::{Result, WalkError};
use crate::lattice::{localized_state, BlochInitialState, LatticeState};
use crate::mat2::{von_neumann_entropy, ComplexMatrix2};
use crate::spectral::QuasiMomentumGrid;

/// Below this value of cos^2 q the generic long-time formula is singular
/// and the analytic limit takes over.
const SINGULAR_COS2_TOL: f64 = 1e-6;

/// Reduced coin state of a pure lattice state: rho_c[s][s'] summed over all
/// sites. Hermitian by construction, with exactly real diagonals.
pub fn reduced_density_matrix(state: &LatticeState) -> ComplexMatrix2 {
    let mut p0 = 0.0;
    let mut p1 = 0.0;
    let mut off = Complex64::new(0.0, 0.0);
    for pair in state.amplitudes().chunks_exact(2) {
        p0 += pair[0].norm_sqr();
        p1 += pair[1].norm_sqr();
        off += pair[0] * pair[1].conj();
    }
    ComplexMatrix2::new(
        Complex64::new(p0, 0.0),
        off,
        off.conj(),
        Complex64::new(p1, 0.0),
    )
}

/// Snapshot of the coin state after `step` walk steps.
#[derive(Clone, Debug)]
pub struct EntropyRecord {
    pub step: usize,
    pub rho_c: ComplexMatrix2,
    pub entropy: f64,
}

/// Entropy trajectory of a walker started at the origin in the given Bloch
/// spinor, under Hadamard coins, for steps 0..=j_max.
pub fn entropy_series(
    q_nodes: usize,
    initial: &BlochInitialState,
    j_max: usize,
) -> Result<Vec<EntropyRecord>> {
    let h = CoinAngles::balanced_phases(std::f64::consts::FRAC_PI_4);
    entropy_series_with_coins(q_nodes, initial, j_max, h, h)
}

/// Entropy trajectory under arbitrary coins.
pub fn entropy_series_with_coins(
    q_nodes: usize,
    initial: &BlochInitialState,
    j_max: usize,
    coin_x: CoinAngles,
    coin_y: CoinAngles,
) -> Result<Vec<EntropyRecord>> {
    let cx = crate::coin::coin_matrix(coin_x)?;
    let cy = crate::coin::coin_matrix(coin_y)?;
    let mut state = localized_state(q_nodes, j_max as i64, initial)?;
    let mut records = Vec::with_capacity(j_max + 1);
    for step in 0..=j_max {
        if step > 0 {
            state = state.step(&cx, &cy)?;
        }
        let rho_c = reduced_density_matrix(&state);
        let entropy = von_neumann_entropy(&rho_c)?;
        records.push(EntropyRecord {
            step,
            rho_c,
            entropy,
        });
    }
    Ok(records)
}

/// Mean of the recorded coin states over steps j_lo..=j_hi; an empirical
/// stand-in for the long-time average.
pub fn time_averaged_rho(records: &[EntropyRecord], j_lo: usize, j_hi: usize) -> ComplexMatrix2 {
    let picked: Vec<&EntropyRecord> = records
        .iter()
        .filter(|r| r.step >= j_lo && r.step <= j_hi)
        .collect();
    assert!(!picked.is_empty(), "empty averaging range {j_lo}..={j_hi}");
    let mut acc = ComplexMatrix2::zero();
    for r in &picked {
        acc = acc.add(&r.rho_c);
    }
    acc.scale(Complex64::new(1.0 / picked.len() as f64, 0.0))
}

/// Per-mode ingredients of the long-time averaged coin state at transverse
/// momentum q, for the start spinor (cos(theta/2), e^{i phi} sin(theta/2)).
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticEntries {
    pub q: f64,
    /// Spin-down diagonal entry contributed by this mode.
    pub r22: f64,
    /// Off-diagonal (upper right) entry contributed by this mode.
    pub r12: Complex64,
    /// Band-average weight nu(q) = |sin q|.
    pub nu: f64,
}

/// Closed-form mode contribution to the long-time coin state.
///
/// The generic expressions carry a 1/cos^2 q factor; at cos^2 q below an
/// internal threshold they are replaced by their finite limits.
pub fn asymptotic_entries(q: f64, theta: f64, phi: f64) -> AsymptoticEntries {
    let nu = q.sin().abs();
    let cos2 = q.cos().powi(2);
    let half = theta / 2.0;
    let (sh, ch) = half.sin_cos();
    let (c2, s2) = (ch * ch, sh * sh);
    let (r22, r12) = if cos2 <= SINGULAR_COS2_TOL {
        // Limits of the generic forms as q -> pi/2 (nu -> 1, cos 2q -> -1).
        let r22 = 0.25 * c2 + 0.75 * s2;
        let r12 = Complex64::new(0.0, -0.25 * phi.sin() * theta.sin());
        (r22, r12)
    } else {
        let cos2q = (2.0 * q).cos();
        let r22 = (c2 * (1.0 - nu) + s2 * (cos2q + nu)) / (2.0 * cos2);
        let phase_sum =
            Complex64::from_polar(1.0, phi - 2.0 * q) + Complex64::from_polar(1.0, -phi);
        let r12 = phase_sum.scale((1.0 - nu) * theta.sin() / (4.0 * cos2));
        (r22, r12)
    };
    AsymptoticEntries { q, r22, r12, nu }
}

/// Long-time averaged coin state on a circumference-Q cylinder.
#[derive(Clone, Debug)]
pub struct AsymptoticRho {
    pub rho: ComplexMatrix2,
    /// Set when Q is a multiple of 4: the spectrum then contains flat bands,
    /// whose stationary modes weaken the time-average argument.
    pub flat_band_warning: bool,
}

/// Long-time averaged coin state: the mean of the mode contributions over
/// the Q quantized transverse momenta.
pub fn asymptotic_rho(q_nodes: usize, theta: f64, phi: f64) -> Result<AsymptoticRho> {
    let grid = QuasiMomentumGrid::new(q_nodes)?;
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(WalkError::InvalidArgument(
            "Bloch angles must be finite".to_string(),
        ));
    }
    let mut r22 = 0.0;
    let mut r12 = Complex64::new(0.0, 0.0);
    for &q in grid.values() {
        let e = asymptotic_entries(q, theta, phi);
        r22 += e.r22;
        r12 += e.r12;
    }
    let inv = 1.0 / q_nodes as f64;
    r22 *= inv;
    r12 = r12.scale(inv);
    let rho = ComplexMatrix2::new(
        Complex64::new(1.0 - r22, 0.0),
        r12,
        r12.conj(),
        Complex64::new(r22, 0.0),
    );
    Ok(AsymptoticRho {
        rho,
        flat_band_warning: q_nodes.is_multiple_of(4),
    })
}

/// Large-circumference limit of the long-time averaged coin state, with the
/// mode average replaced by its integral.
pub fn asymptotic_rho_infinite(theta: f64, phi: f64) -> ComplexMatrix2 {
    let a11 = (PI + (PI - 2.0) * theta.cos()) / (2.0 * PI);
    let a12 = (Complex64::from_polar(1.0, -phi) + Complex64::from_polar(1.0, phi).scale(PI - 3.0))
        .scale(theta.sin() / (2.0 * PI));
    // Unit trace held exactly.
    let a22 = 1.0 - a11;
    ComplexMatrix2::new(
        Complex64::new(a11, 0.0),
        a12,
        a12.conj(),
        Complex64::new(a22, 0.0),
    )
}

/// Entropy of the infinite-circumference long-time coin state.
pub fn asymptotic_entropy_infinite(theta: f64, phi: f64) -> Result<f64> {
    von_neumann_entropy(&asymptotic_rho_infinite(theta, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn initial_state_is_pure() {
        let st = localized_state(3, 5, &BlochInitialState::new(1.1, 0.7)).unwrap();
        let rho = reduced_density_matrix(&st);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        // Purity: tr(rho^2) = 1.
        let sq = rho.mul(&rho);
        assert!((sq.trace().re - 1.0).abs() < 1e-13);
        assert!(von_neumann_entropy(&rho).unwrap() < 1e-10);
    }

    #[test]
    fn reduced_density_matrix_is_exactly_hermitian() {
        use crate::coin::hadamard_coin;
        let h = hadamard_coin();
        let st = localized_state(5, 20, &BlochInitialState::new(0.9, 2.2))
            .unwrap()
            .evolve(17, &h, &h)
            .unwrap();
        let rho = reduced_density_matrix(&st);
        assert_eq!(rho.a21, rho.a12.conj());
        assert_eq!(rho.a11.im, 0.0);
        assert_eq!(rho.a22.im, 0.0);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_series_starts_pure_and_stays_bounded() {
        let recs = entropy_series(2, &BlochInitialState::new(FRAC_PI_2, FRAC_PI_2), 30).unwrap();
        assert_eq!(recs.len(), 31);
        assert_eq!(recs[0].step, 0);
        assert!(recs[0].entropy < 1e-10);
        for r in &recs {
            assert!(r.entropy >= 0.0 && r.entropy <= 1.0);
        }
        // The walk entangles the coin within a few steps.
        assert!(recs[5].entropy > 0.1);
    }

    #[test]
    fn entropy_series_with_coins_matches_hadamard_default() {
        let b = BlochInitialState::new(0.8, 1.3);
        let a = entropy_series(3, &b, 12).unwrap();
        let h = CoinAngles::balanced_phases(FRAC_PI_4);
        let c = entropy_series_with_coins(3, &b, 12, h, h).unwrap();
        for (x, y) in a.iter().zip(&c) {
            assert_eq!(x.entropy.to_bits(), y.entropy.to_bits());
        }
    }

    #[test]
    fn time_averaged_rho_means_selected_steps() {
        let recs = entropy_series(2, &BlochInitialState::new(FRAC_PI_2, 0.0), 10).unwrap();
        let avg = time_averaged_rho(&recs, 3, 5);
        let mut want = ComplexMatrix2::zero();
        for r in &recs[3..=5] {
            want = want.add(&r.rho_c);
        }
        want = want.scale(Complex64::new(1.0 / 3.0, 0.0));
        assert!(avg.max_abs_diff(&want) < 1e-15);
        assert!((avg.trace().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mode_entries_at_zero_momentum() {
        // q = 0: nu = 0 and cos 2q = 1 collapse the generic forms to
        // r22 = (cos^2(t/2) + sin^2(t/2))/2 = 1/2 and
        // r12 = (e^{i phi} + e^{-i phi}) sin t / 4 = cos(phi) sin(t) / 2.
        for (theta, phi) in [(0.7, 0.3), (2.1, -1.0), (FRAC_PI_2, FRAC_PI_2)] {
            let e = asymptotic_entries(0.0, theta, phi);
            assert_eq!(e.nu, 0.0);
            assert!((e.r22 - 0.5).abs() < 1e-14);
            let want = 0.5 * phi.cos() * theta.sin();
            assert!((e.r12.re - want).abs() < 1e-14);
            assert!(e.r12.im.abs() < 1e-14);
        }
    }

    #[test]
    fn mode_entries_limit_agrees_with_two_sided_approach() {
        let (theta, phi) = (1.2, 0.5);
        let at = asymptotic_entries(FRAC_PI_2, theta, phi);
        assert!((at.nu - 1.0).abs() < 1e-15);
        for dq in [1e-4, -1e-4] {
            let near = asymptotic_entries(FRAC_PI_2 + dq, theta, phi);
            assert!((near.r22 - at.r22).abs() < 1e-3, "r22 jump {}", near.r22 - at.r22);
            assert!((near.r12 - at.r12).norm() < 1e-3);
        }
        // Frozen limit values at theta = phi = pi/2: r22 = 1/2, r12 = -i/4.
        let e = asymptotic_entries(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2);
        assert!((e.r22 - 0.5).abs() < 1e-12);
        assert!((e.r12 - Complex64::new(0.0, -0.25)).norm() < 1e-12);
    }

    #[test]
    fn single_mode_cylinder_examples() {
        // Q = 1 keeps only the q = 0 mode, where r22 = 1/2 and
        // r12 = cos(phi) sin(theta) / 2. Start (1, i)/sqrt2: r12 = 0, rho = I/2.
        let r = asymptotic_rho(1, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!(r.rho.max_abs_diff(&ComplexMatrix2::new(
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        )) < 1e-14);
        assert!((von_neumann_entropy(&r.rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(!r.flat_band_warning);

        // Start (1, 1)/sqrt2 instead: maximal real off-diagonal, pure state.
        let r = asymptotic_rho(1, FRAC_PI_2, 0.0).unwrap();
        assert!(r.rho.max_abs_diff(&ComplexMatrix2::new(
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
        )) < 1e-14);
        assert!(von_neumann_entropy(&r.rho).unwrap() < 1e-10);
    }

    #[test]
    fn flat_band_warning_follows_circumference() {
        for (q_nodes, want) in [(1, false), (2, false), (4, true), (5, false), (8, true), (12, true)] {
            let r = asymptotic_rho(q_nodes, 0.3, 0.4).unwrap();
            assert_eq!(r.flat_band_warning, want, "Q={q_nodes}");
        }
        assert!(asymptotic_rho(0, 0.3, 0.4).is_err());
        assert!(asymptotic_rho(3, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn infinite_limit_matches_large_circumference_average() {
        let (theta, phi) = (1.234, 2.345);
        let fin = asymptotic_rho(401, theta, phi).unwrap();
        let inf = asymptotic_rho_infinite(theta, phi);
        assert!(fin.rho.max_abs_diff(&inf) < 1e-4, "diff {}", fin.rho.max_abs_diff(&inf));
        assert_eq!(inf.trace().re, 1.0);
        assert_eq!(inf.trace().im, 0.0);
    }

    #[test]
    fn infinite_limit_frozen_values() {
        let rho = asymptotic_rho_infinite(FRAC_PI_2, FRAC_PI_2);
        // Off-diagonal magnitude (4 - pi) / (2 pi), eigenvalues 2/pi and 1 - 2/pi.
        let want = (4.0 - PI) / (2.0 * PI);
        assert!((rho.a12.norm() - want).abs() < 1e-14);
        let (lo, hi) = rho.hermitian_eigenvalues();
        assert!((hi - 2.0 / PI).abs() < 1e-12);
        assert!((lo - (1.0 - 2.0 / PI)).abs() < 1e-12);
        let s = asymptotic_entropy_infinite(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((s - 0.94545).abs() < 1e-3, "entropy {s}");

        // theta = 0 start: entropy drops but stays near the plateau.
        let s0 = asymptotic_entropy_infinite(0.0, 0.0).unwrap();
        assert!((s0 - 0.90253).abs() < 1e-3, "entropy {s0}");
        assert!(s > s0);
    }

    #[test]
    fn weight_identity_nu_squared() {
        for i in 0..=64 {
            let q = -PI + 2.0 * PI * i as f64 / 64.0;
            let e = asymptotic_entries(q, 0.9, 0.2);
            let via_cos = 0.5 * (1.0 - (2.0 * q).cos());
            assert!((e.nu * e.nu - via_cos).abs() < 1e-15, "q={q}");
            assert!(e.r22 >= -1e-12 && e.r22 <= 1.0 + 1e-12);
        }
    }
}
