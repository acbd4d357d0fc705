//! Momentum-space picture: Bloch matrix, dispersion, eigensystem, spectral
//! powers, transform-based evolution, group velocities and the band census.
//!
//! Conventions, fixed once and validated against the real-space engine:
//! the forward transform is psi_hat(k, q) = sum e^{-i(k m + q l)} psi_{m,l},
//! the x grid uses k_n = 2 pi n / N and the closed direction q_i = 2 pi i / Q,
//! and the one-step Bloch matrix in that basis is D(q) C_y D(k) C_x with
//! D(kappa) = diag(e^{-i kappa}, e^{+i kappa}).

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Result, WalkError};
use crate::lattice::LatticeState;
use crate::mat2::ComplexMatrix2;

/// Two bands closer than this (in |sin omega|) count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Grid resolution used by the band census.
pub const CENSUS_GRID_POINTS: usize = 1024;

/// Max-norm distance below which two dispersion curves are the same state.
const CURVE_MATCH_TOL: f64 = 1e-10;

/// Below this norm the closed-form eigenvector has collapsed to the zero
/// vector (sin k = 0 branch) and direct diagonalization takes over.
const EIGVEC_NORM_TOL: f64 = 1e-7;

/// The quantized quasi-momenta q_i = 2 pi i / Q of the closed direction,
/// reduced to the Brillouin zone (-pi, pi].
#[derive(Clone, Debug)]
pub struct QuasiMomentumGrid {
    q_nodes: usize,
    values: Vec<f64>,
}

impl QuasiMomentumGrid {
    pub fn new(q_nodes: usize) -> Result<Self> {
        if q_nodes < 1 {
            return Err(WalkError::InvalidArgument(
                "Q must be at least 1".to_string(),
            ));
        }
        let values = (0..q_nodes)
            .map(|i| {
                let raw = 2.0 * PI * i as f64 / q_nodes as f64;
                if raw > PI {
                    raw - 2.0 * PI
                } else {
                    raw
                }
            })
            .collect();
        Ok(Self { q_nodes, values })
    }

    pub fn len(&self) -> usize {
        self.q_nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }
}

/// One sampled point of the band structure (Hadamard coins).
#[derive(Clone, Debug)]
pub struct BandPoint {
    pub k: f64,
    pub q: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub eigvec_plus: [Complex64; 2],
    pub eigvec_minus: [Complex64; 2],
    pub group_velocity_plus: f64,
}

/// Grouping of the Q dispersion curves into distinct band states.
#[derive(Clone, Debug, Serialize)]
pub struct BandCensus {
    #[serde(rename = "Q")]
    pub q_nodes: usize,
    pub distinct: usize,
    pub multiplicities: Vec<usize>,
    pub flat: bool,
}

/// One-step Bloch matrix U_q(k) for mixing angles (theta_x, theta_y) and
/// zero coin phases.
pub fn walk_matrix(k: f64, q: f64, theta_x: f64, theta_y: f64) -> ComplexMatrix2 {
    let (sx, cx) = theta_x.sin_cos();
    let (sy, cy) = theta_y.sin_cos();
    let f_kq = Complex64::from_polar(1.0, -(k + q));
    let f_kmq = Complex64::from_polar(1.0, -(k - q));
    let e2ik = Complex64::from_polar(1.0, 2.0 * k);
    ComplexMatrix2::new(
        f_kq * (Complex64::new(cx * cy, 0.0) + e2ik.scale(sx * sy)),
        f_kq * (Complex64::new(cy * sx, 0.0) - e2ik.scale(cx * sy)),
        f_kmq * (Complex64::new(cx * sy, 0.0) - e2ik.scale(cy * sx)),
        f_kmq * (e2ik.scale(cx * cy) + Complex64::new(sx * sy, 0.0)),
    )
}

/// Band frequencies (omega_plus in [0, pi], omega_minus = -omega_plus) from
/// cos omega = cos(tx) cos(ty) cos(k+q) + sin(tx) sin(ty) cos(k-q).
///
/// Evaluated through the algebraically equal half-angle split
/// sin^2(w/2) = cxcy sin^2((k+q)/2) + sxsy sin^2((k-q)/2) + sin^2((tx-ty)/2)
/// (and its cos^2 counterpart), which keeps full relative precision near the
/// band edges where acos of the raw cosine would lose digits.
pub fn dispersion(k: f64, q: f64, theta_x: f64, theta_y: f64) -> (f64, f64) {
    let (sx, cx) = theta_x.sin_cos();
    let (sy, cy) = theta_y.sin_cos();
    let (a, b) = (cx * cy, sx * sy);
    let half_sum = 0.5 * (k + q);
    let half_diff = 0.5 * (k - q);
    let coin_gap = (0.5 * (theta_x - theta_y)).sin().powi(2);
    let s2 = a * half_sum.sin().powi(2) + b * half_diff.sin().powi(2) + coin_gap;
    let c2 = a * half_sum.cos().powi(2) + b * half_diff.cos().powi(2) + coin_gap;
    let omega = 2.0 * s2.max(0.0).sqrt().atan2(c2.max(0.0).sqrt());
    (omega, -omega)
}

fn hadamard_dispersion(k: f64, q: f64) -> (f64, f64) {
    dispersion(k, q, FRAC_PI_4, FRAC_PI_4)
}

/// Eigenvector of `u` for the (simple) eigenvalue `lambda`, from the larger
/// of the two nullspace candidates of u - lambda I.
fn eigenvector_direct(u: &ComplexMatrix2, lambda: Complex64) -> [Complex64; 2] {
    let v1 = [-u.a12, u.a11 - lambda];
    let v2 = [u.a22 - lambda, -u.a21];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let v = if n1 >= n2 { v1 } else { v2 };
    let inv = 1.0 / (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0].scale(inv), v[1].scale(inv)]
}

fn normalized(v: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if n <= EIGVEC_NORM_TOL {
        return None;
    }
    let inv = 1.0 / n;
    Some([v[0].scale(inv), v[1].scale(inv)])
}

/// Unit eigenvectors (phi_plus, phi_minus) of the Hadamard walk matrix,
/// paired so that U phi_plus = e^{-i omega_plus} phi_plus.
///
/// Uses the closed form (e^{-iq} sin k, -sin q cos k +/- sin omega); when
/// that collapses to the zero vector (sin k = 0) the eigenvector comes from
/// direct diagonalization instead.
pub fn eigensystem(k: f64, q: f64) -> Result<([Complex64; 2], [Complex64; 2])> {
    let (omega, _) = hadamard_dispersion(k, q);
    let s_omega = omega.sin();
    if s_omega <= DEGENERACY_TOL {
        return Err(WalkError::DegeneratePoint { k, q });
    }
    let first = Complex64::from_polar(k.sin(), -q);
    let base = -q.sin() * k.cos();
    let raw_plus = [first, Complex64::new(base + s_omega, 0.0)];
    let raw_minus = [first, Complex64::new(base - s_omega, 0.0)];
    let u = walk_matrix(k, q, FRAC_PI_4, FRAC_PI_4);
    let plus = normalized(raw_plus)
        .unwrap_or_else(|| eigenvector_direct(&u, Complex64::from_polar(1.0, -omega)));
    let minus = normalized(raw_minus)
        .unwrap_or_else(|| eigenvector_direct(&u, Complex64::from_polar(1.0, omega)));
    Ok((plus, minus))
}

/// Eigenvectors for arbitrary mixing angles, by direct diagonalization.
pub fn eigensystem_general(
    k: f64,
    q: f64,
    theta_x: f64,
    theta_y: f64,
) -> Result<([Complex64; 2], [Complex64; 2])> {
    let (omega, _) = dispersion(k, q, theta_x, theta_y);
    if omega.sin() <= DEGENERACY_TOL {
        return Err(WalkError::DegeneratePoint { k, q });
    }
    let u = walk_matrix(k, q, theta_x, theta_y);
    let plus = eigenvector_direct(&u, Complex64::from_polar(1.0, -omega));
    let minus = eigenvector_direct(&u, Complex64::from_polar(1.0, omega));
    Ok((plus, minus))
}

fn spectral_power_from(
    u: &ComplexMatrix2,
    eig: Result<([Complex64; 2], [Complex64; 2])>,
    omega: f64,
    j: usize,
) -> ComplexMatrix2 {
    if j == 0 {
        return ComplexMatrix2::identity();
    }
    match eig {
        Ok((plus, minus)) => {
            let jp = -(omega * j as f64);
            let proj_plus = ComplexMatrix2::outer(plus).scale(Complex64::from_polar(1.0, jp));
            let proj_minus = ComplexMatrix2::outer(minus).scale(Complex64::from_polar(1.0, -jp));
            proj_plus.add(&proj_minus)
        }
        // Coinciding bands: the projector split is ill-conditioned, but the
        // walk matrix is (up to sign) the identity there, so plain repeated
        // multiplication is exact enough.
        Err(_) => {
            let mut acc = ComplexMatrix2::identity();
            for _ in 0..j {
                acc = acc.mul(u);
            }
            acc
        }
    }
}

/// j-th power of the Hadamard walk matrix via the spectral theorem,
/// U^j = e^{-i omega j} P_plus + e^{+i omega j} P_minus.
pub fn spectral_power(k: f64, q: f64, j: usize) -> ComplexMatrix2 {
    let u = walk_matrix(k, q, FRAC_PI_4, FRAC_PI_4);
    let (omega, _) = hadamard_dispersion(k, q);
    spectral_power_from(&u, eigensystem(k, q), omega, j)
}

/// j-th power of the walk matrix for arbitrary mixing angles.
pub fn spectral_power_general(k: f64, q: f64, theta_x: f64, theta_y: f64, j: usize) -> ComplexMatrix2 {
    let u = walk_matrix(k, q, theta_x, theta_y);
    let (omega, _) = dispersion(k, q, theta_x, theta_y);
    spectral_power_from(&u, eigensystem_general(k, q, theta_x, theta_y), omega, j)
}

/// Upper-band group velocity d omega/dk = sin k cos q / sin omega of the
/// Hadamard walk.
pub fn group_velocity(k: f64, q: f64) -> Result<f64> {
    let (omega, _) = hadamard_dispersion(k, q);
    let s = omega.sin();
    if s <= DEGENERACY_TOL {
        return Err(WalkError::UndefinedDerivative { k, q });
    }
    Ok(k.sin() * q.cos() / s)
}

/// Upper-band group velocity for arbitrary mixing angles.
pub fn group_velocity_general(k: f64, q: f64, theta_x: f64, theta_y: f64) -> Result<f64> {
    let (omega, _) = dispersion(k, q, theta_x, theta_y);
    let s = omega.sin();
    if s <= DEGENERACY_TOL {
        return Err(WalkError::UndefinedDerivative { k, q });
    }
    let (sx, cx) = theta_x.sin_cos();
    let (sy, cy) = theta_y.sin_cos();
    Ok((cx * cy * (k + q).sin() + sx * sy * (k - q).sin()) / s)
}

/// Full spectral record at (k, q) for Hadamard coins.
pub fn band_point(k: f64, q: f64) -> Result<BandPoint> {
    band_point_general(k, q, FRAC_PI_4, FRAC_PI_4)
}

/// Full spectral record at (k, q) for arbitrary mixing angles.
pub fn band_point_general(k: f64, q: f64, theta_x: f64, theta_y: f64) -> Result<BandPoint> {
    let (omega_plus, omega_minus) = dispersion(k, q, theta_x, theta_y);
    let hadamard = theta_x == FRAC_PI_4 && theta_y == FRAC_PI_4;
    let (eigvec_plus, eigvec_minus) = if hadamard {
        eigensystem(k, q)?
    } else {
        eigensystem_general(k, q, theta_x, theta_y)?
    };
    let group_velocity_plus = group_velocity_general(k, q, theta_x, theta_y)?;
    Ok(BandPoint {
        k,
        q,
        omega_plus,
        omega_minus,
        eigvec_plus,
        eigvec_minus,
        group_velocity_plus,
    })
}

/// Midpoint grid of n points covering (-pi, pi); avoids the band-touching
/// momenta k = 0 and k = pi for every n.
pub fn midpoint_k_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Groups the Q upper-band curves omega_plus(k; q_i) into distinct states.
///
/// Curves are compared through |cos omega| on a 1024-point k grid, which
/// identifies the q and q+pi sectors (their walk matrices differ by a global
/// sign, so they carry the same band pair). `flat` reports whether any curve
/// has zero bandwidth.
pub fn band_census(q_nodes: usize, theta_x: f64, theta_y: f64) -> Result<BandCensus> {
    let grid = QuasiMomentumGrid::new(q_nodes)?;
    let ks = midpoint_k_grid(CENSUS_GRID_POINTS);
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    let mut flat = false;
    for i in 0..q_nodes {
        let q = grid.value(i);
        let mut folded = Vec::with_capacity(ks.len());
        let mut omega_lo = f64::INFINITY;
        let mut omega_hi = f64::NEG_INFINITY;
        for &k in &ks {
            let (omega, _) = dispersion(k, q, theta_x, theta_y);
            folded.push(omega.cos().abs());
            omega_lo = omega_lo.min(omega);
            omega_hi = omega_hi.max(omega);
        }
        if omega_hi - omega_lo <= 1e-12 {
            flat = true;
        }
        let found = reps.iter().position(|rep| {
            rep.iter()
                .zip(&folded)
                .all(|(a, b)| (a - b).abs() < CURVE_MATCH_TOL)
        });
        match found {
            Some(idx) => multiplicities[idx] += 1,
            None => {
                reps.push(folded);
                multiplicities.push(1);
            }
        }
    }
    Ok(BandCensus {
        q_nodes,
        distinct: reps.len(),
        multiplicities,
        flat,
    })
}

fn next_fast_len(target: usize) -> usize {
    let mut n = target.max(1);
    loop {
        let mut m = n;
        for p in [2usize, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Evolves a state j steps through the momentum representation with
/// Hadamard coins: transform, apply `spectral_power` mode by mode, transform
/// back. Agrees with the real-space engine to within rounding.
pub fn momentum_evolve(initial: &LatticeState, steps: usize) -> Result<LatticeState> {
    momentum_evolve_impl(initial, steps, |k, q| spectral_power(k, q, steps))
}

/// Momentum-space evolution for arbitrary mixing angles.
pub fn momentum_evolve_general(
    initial: &LatticeState,
    steps: usize,
    theta_x: f64,
    theta_y: f64,
) -> Result<LatticeState> {
    momentum_evolve_impl(initial, steps, |k, q| {
        spectral_power_general(k, q, theta_x, theta_y, steps)
    })
}

fn momentum_evolve_impl(
    initial: &LatticeState,
    steps: usize,
    power: impl Fn(f64, f64) -> ComplexMatrix2,
) -> Result<LatticeState> {
    let window = initial.window();
    let q_nodes = initial.q_nodes();
    let rows = initial.rows();
    // The transforms are exact only while the support stays strictly inside
    // the window, matching the real-space overflow rule.
    let support = initial.max_support().unwrap_or(0);
    if support + steps as i64 > window {
        return Err(WalkError::WindowOverflow { window });
    }

    let n = next_fast_len(rows);
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    // Forward FFT along m for each (l, s) column; site m sits at n-index
    // m mod N, which the inverse gather mirrors.
    let zero = Complex64::new(0.0, 0.0);
    let mut columns = vec![zero; n * q_nodes * 2];
    let amps = initial.amplitudes();
    for l in 0..q_nodes {
        for s in 0..2 {
            let col = (l * 2 + s) * n;
            let buf = &mut columns[col..col + n];
            for row in 0..rows {
                let m = row as i64 - window;
                buf[m.rem_euclid(n as i64) as usize] = amps[(row * q_nodes + l) * 2 + s];
            }
            fft.process(buf);
        }
    }

    // Exact DFT kernel around the closed direction, from integer phases.
    let kernel: Vec<Complex64> = (0..q_nodes * q_nodes)
        .map(|idx| {
            let (i, l) = (idx / q_nodes, idx % q_nodes);
            Complex64::from_polar(1.0, -2.0 * PI * ((i * l) % q_nodes) as f64 / q_nodes as f64)
        })
        .collect();

    let mut hat = vec![zero; q_nodes * 2];
    for n_idx in 0..n {
        let k = 2.0 * PI * n_idx as f64 / n as f64;
        for i in 0..q_nodes {
            let q = 2.0 * PI * i as f64 / q_nodes as f64;
            let mut spinor = [zero; 2];
            for l in 0..q_nodes {
                let w = kernel[i * q_nodes + l];
                spinor[0] += w * columns[(l * 2) * n + n_idx];
                spinor[1] += w * columns[(l * 2 + 1) * n + n_idx];
            }
            let advanced = power(k, q).apply(spinor);
            hat[i * 2] = advanced[0];
            hat[i * 2 + 1] = advanced[1];
        }
        let inv_q = 1.0 / q_nodes as f64;
        for l in 0..q_nodes {
            for s in 0..2 {
                let mut acc = zero;
                for i in 0..q_nodes {
                    acc += kernel[i * q_nodes + l].conj() * hat[i * 2 + s];
                }
                columns[(l * 2 + s) * n + n_idx] = acc.scale(inv_q);
            }
        }
    }

    let mut out = vec![zero; rows * q_nodes * 2];
    let inv_n = 1.0 / n as f64;
    for l in 0..q_nodes {
        for s in 0..2 {
            let col = (l * 2 + s) * n;
            let buf = &mut columns[col..col + n];
            ifft.process(buf);
            for row in 0..rows {
                let m = row as i64 - window;
                out[(row * q_nodes + l) * 2 + s] =
                    buf[m.rem_euclid(n as i64) as usize].scale(inv_n);
            }
        }
    }
    Ok(LatticeState::from_raw(q_nodes, window, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{localized_state, BlochInitialState};
    use std::f64::consts::FRAC_PI_2;

    const H: f64 = FRAC_PI_4;

    fn diag_phase(kappa: f64) -> ComplexMatrix2 {
        ComplexMatrix2::new(
            Complex64::from_polar(1.0, -kappa),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, kappa),
        )
    }

    #[test]
    fn walk_matrix_is_identity_at_origin_for_hadamard() {
        let u = walk_matrix(0.0, 0.0, H, H);
        assert!(u.max_abs_diff(&ComplexMatrix2::identity()) < 1e-15);
    }

    #[test]
    fn walk_matrix_equals_shift_coin_product() {
        use crate::coin::{coin_matrix, CoinAngles};
        for &(k, q, tx, ty) in &[
            (0.3, -1.2, H, H),
            (2.5, 0.7, H, PI / 6.0),
            (-1.9, 2.9, 1.1, 0.4),
            (0.0, PI, 0.9, 2.2),
        ] {
            let cx = coin_matrix(CoinAngles::balanced_phases(tx)).unwrap();
            let cy = coin_matrix(CoinAngles::balanced_phases(ty)).unwrap();
            let product = diag_phase(q).mul(&cy).mul(&diag_phase(k)).mul(&cx);
            let direct = walk_matrix(k, q, tx, ty);
            assert!(
                direct.max_abs_diff(&product) < 1e-13,
                "(k={k}, q={q}, tx={tx}, ty={ty})"
            );
            assert!(direct.unitarity_error() < 1e-12);
            assert!((direct.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dispersion_examples() {
        let (wp, wm) = hadamard_dispersion(0.0, 0.0);
        assert!(wp.abs() < 1e-12 && wm.abs() < 1e-12);
        for k in [-2.8, -0.4, 0.0, 1.3] {
            let (wp, _) = hadamard_dispersion(k, FRAC_PI_2);
            assert!((wp - FRAC_PI_2).abs() < 1e-12, "flat band at q=pi/2");
            let (w0, _) = hadamard_dispersion(k, 0.0);
            assert!((w0 - k.abs()).abs() < 1e-12, "massless line at q=0");
        }
    }

    #[test]
    fn eigenphases_match_dispersion_for_general_angles() {
        for &(k, q) in &[(0.9, 0.3), (-2.0, 1.7), (0.2, -3.0)] {
            for &(tx, ty) in &[(H, H), (H, PI / 6.0), (1.2, 0.5)] {
                let u = walk_matrix(k, q, tx, ty);
                let (wp, _) = dispersion(k, q, tx, ty);
                // Eigenvalues via the characteristic polynomial.
                let tr = u.trace();
                let disc = (tr * tr - u.det().scale(4.0)).sqrt();
                let l1 = (tr + disc).scale(0.5);
                let l2 = (tr - disc).scale(0.5);
                let ep = Complex64::from_polar(1.0, -wp);
                let em = Complex64::from_polar(1.0, wp);
                let direct = ((l1 - ep).norm().max((l2 - em).norm()))
                    .min((l1 - em).norm().max((l2 - ep).norm()));
                assert!(direct < 1e-12, "eigenphase mismatch {direct}");
            }
        }
    }

    #[test]
    fn eigensystem_closed_form_and_pairing() {
        let (plus, minus) = eigensystem(FRAC_PI_2, 0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // Up to a global phase the vectors are (1, 1)/sqrt2 and (1, -1)/sqrt2.
        let overlap_p = (plus[0].conj() * r + plus[1].conj() * r).norm();
        let overlap_m = (minus[0].conj() * r - minus[1].conj() * r).norm();
        assert!((overlap_p - 1.0).abs() < 1e-12);
        assert!((overlap_m - 1.0).abs() < 1e-12);

        for &(k, q) in &[(0.7, 1.9), (2.2, -0.4), (1e-3, 2.0), (0.0, 1.0), (PI, 0.35)] {
            let (plus, minus) = eigensystem(k, q).unwrap();
            let u = walk_matrix(k, q, H, H);
            let (wp, _) = hadamard_dispersion(k, q);
            let up = u.apply(plus);
            let um = u.apply(minus);
            let ep = Complex64::from_polar(1.0, -wp);
            let em = Complex64::from_polar(1.0, wp);
            let res_p = (up[0] - ep * plus[0]).norm().max((up[1] - ep * plus[1]).norm());
            let res_m = (um[0] - em * minus[0]).norm().max((um[1] - em * minus[1]).norm());
            assert!(res_p < 1e-10, "plus residual {res_p} at ({k}, {q})");
            assert!(res_m < 1e-10, "minus residual {res_m} at ({k}, {q})");
            let dot = (plus[0].conj() * minus[0] + plus[1].conj() * minus[1]).norm();
            assert!(dot < 1e-10, "orthogonality {dot}");
        }
    }

    #[test]
    fn eigensystem_errors_at_band_touching() {
        assert!(matches!(
            eigensystem(0.0, 0.0),
            Err(WalkError::DegeneratePoint { .. })
        ));
        assert!(matches!(
            eigensystem_general(0.0, 0.0, H, H),
            Err(WalkError::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn spectral_power_matches_brute_force() {
        assert!(spectral_power(0.7, 0.3, 0)
            .max_abs_diff(&ComplexMatrix2::identity())
            < 1e-15);
        let u = walk_matrix(0.7, 0.3, H, H);
        assert!(spectral_power(0.7, 0.3, 1).max_abs_diff(&u) < 1e-13);

        let (k, q) = (0.7, 2.0 * PI / 5.0);
        let mut brute = ComplexMatrix2::identity();
        let u = walk_matrix(k, q, H, H);
        for _ in 0..137 {
            brute = brute.mul(&u);
        }
        assert!(spectral_power(k, q, 137).max_abs_diff(&brute) < 1e-10);

        // Degenerate corner falls back to multiplication.
        let id137 = spectral_power(0.0, 0.0, 137);
        assert!(id137.max_abs_diff(&ComplexMatrix2::identity()) < 1e-12);
        assert!(id137.unitarity_error() < 1e-12);
    }

    #[test]
    fn group_velocity_examples() {
        for k in [0.3, 1.0, 2.8] {
            assert!((group_velocity(k, 0.0).unwrap() - 1.0).abs() < 1e-12);
            assert!(group_velocity(k, FRAC_PI_2).unwrap().abs() < 1e-12);
        }
        let q = 2.0 * PI / 6.0;
        let vmax = (0..200_000)
            .map(|i| PI * (i as f64 + 0.5) / 200_000.0)
            .map(|k| group_velocity(k, q).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((vmax - 0.5).abs() < 1e-6, "max velocity {vmax}");
        assert!(matches!(
            group_velocity(0.0, 0.0),
            Err(WalkError::UndefinedDerivative { .. })
        ));
    }

    #[test]
    fn quasi_momentum_grid_reduces_to_brillouin_zone() {
        let g = QuasiMomentumGrid::new(4).unwrap();
        let want = [0.0, FRAC_PI_2, PI, -FRAC_PI_2];
        for (a, b) in g.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
        assert_eq!(g.value(0), 0.0);
        assert!(QuasiMomentumGrid::new(0).is_err());
        let odd = QuasiMomentumGrid::new(5).unwrap();
        assert!(odd.values().iter().all(|&q| q > -PI && q <= PI));
    }

    #[test]
    fn census_counts_hadamard_band_states() {
        let cases = [
            (1usize, 1usize, vec![1usize], false),
            (2, 1, vec![2], false),
            (4, 2, vec![2, 2], true),
            (5, 3, vec![1, 2, 2], false),
            (6, 2, vec![2, 4], false),
            (8, 3, vec![2, 4, 2], true),
        ];
        for (q_nodes, distinct, mult, flat) in cases {
            let c = band_census(q_nodes, H, H).unwrap();
            assert_eq!(c.distinct, distinct, "Q={q_nodes}");
            assert_eq!(c.multiplicities, mult, "Q={q_nodes}");
            assert_eq!(c.flat, flat, "Q={q_nodes}");
            assert_eq!(c.multiplicities.iter().sum::<usize>(), q_nodes);
        }
        // The q and q+pi identification is sign based, not Hadamard specific.
        let general = band_census(4, H, PI / 6.0).unwrap();
        assert_eq!(general.distinct, 2);
    }

    #[test]
    fn band_point_carries_consistent_record() {
        let p = band_point(1.1, 0.9).unwrap();
        assert_eq!(p.omega_minus, -p.omega_plus);
        let rhs = 1.1f64.cos() * 0.9f64.cos();
        assert!((p.omega_plus.cos() - rhs).abs() < 1e-12);
        assert!(p.group_velocity_plus.abs() <= 1.0 + 1e-12);
        let n = p.eigvec_plus[0].norm_sqr() + p.eigvec_plus[1].norm_sqr();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn momentum_round_trip_without_steps() {
        let init = localized_state(5, 7, &BlochInitialState::new(1.0, 0.4)).unwrap();
        let back = momentum_evolve(&init, 0).unwrap();
        let worst = init
            .amplitudes()
            .iter()
            .zip(back.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "round trip error {worst}");
    }

    #[test]
    fn momentum_engine_matches_lattice_engine() {
        use crate::coin::hadamard_coin;
        let h = hadamard_coin();
        for (q_nodes, steps) in [(1usize, 100usize), (5, 50), (4, 33), (2, 17)] {
            let init = localized_state(q_nodes, steps as i64, &BlochInitialState::new(FRAC_PI_2, FRAC_PI_2))
                .unwrap();
            let direct = init.evolve(steps, &h, &h).unwrap();
            let spectral = momentum_evolve(&init, steps).unwrap();
            let worst = direct
                .amplitudes()
                .iter()
                .zip(spectral.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "Q={q_nodes} j={steps}: {worst}");
        }
    }

    #[test]
    fn momentum_engine_rejects_undersized_window() {
        let init = localized_state(3, 10, &BlochInitialState::new(FRAC_PI_2, 0.0)).unwrap();
        assert!(matches!(
            momentum_evolve(&init, 11),
            Err(WalkError::WindowOverflow { window: 10 })
        ));
        assert!(momentum_evolve(&init, 10).is_ok());
    }

    #[test]
    fn next_fast_len_finds_5_smooth_sizes() {
        assert_eq!(next_fast_len(1), 1);
        assert_eq!(next_fast_len(101), 108);
        assert_eq!(next_fast_len(1001), 1024);
        assert_eq!(next_fast_len(7), 8);
        assert_eq!(next_fast_len(96), 96);
    }
}
