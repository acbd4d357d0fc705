//! Real-space state and direct unitary evolution on the cylinder Z x Z/Q.
//!
//! The walker lives on sites (m, l) with m in a truncated window [-M, M] of
//! the open direction and l in 0..Q around the closed one, carrying a qubit
//! coin. One step applies coin-x, shift-x, coin-y, shift-y in that order.
//! The window is a hard wall only in the sense that the evolution refuses to
//! run when amplitude would cross it, so a sufficiently wide window makes the
//! truncated simulation exactly equal to the infinite-lattice walk.

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::mat2::ComplexMatrix2;

/// Bloch-sphere angles (theta, phi) of the initial coin state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochInitialState {
    pub theta: f64,
    pub phi: f64,
}

impl BlochInitialState {
    pub const fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Spinor (cos(theta/2), e^{i phi} sin(theta/2)); unit norm.
    pub fn spinor(&self) -> Result<[Complex64; 2]> {
        if !(self.theta.is_finite() && self.phi.is_finite()) {
            return Err(WalkError::InvalidArgument(format!(
                "Bloch angles must be finite, got (theta={}, phi={})",
                self.theta, self.phi
            )));
        }
        let (s, c) = (0.5 * self.theta).sin_cos();
        Ok([Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)])
    }
}

/// Amplitude field psi_{m,l;s} on the window [-M, M] x Z/Q x {+1, -1}.
///
/// Layout is m-major, then l, then the spin index (0 for s = +1, 1 for
/// s = -1), so the x shift is a contiguous row move. Unit norm is an
/// invariant of every constructor and of `step`.
#[derive(Clone, Debug)]
pub struct LatticeState {
    q_nodes: usize,
    window: i64,
    amps: Vec<Complex64>,
}

/// Joint distribution P(m, l), stored m-major.
#[derive(Clone, Debug)]
pub struct ProbabilityGrid {
    pub q_nodes: usize,
    pub window: i64,
    /// values[row * q_nodes + l] with m = row - window.
    pub values: Vec<f64>,
}

/// Marginal distribution P(m) over the open direction.
#[derive(Clone, Debug)]
pub struct MarginalDistribution {
    pub window: i64,
    /// values[row] with m = row - window.
    pub values: Vec<f64>,
}

impl ProbabilityGrid {
    pub fn value(&self, m: i64, l: usize) -> f64 {
        let row = m + self.window;
        if row < 0 || row >= self.values.len() as i64 / self.q_nodes as i64 {
            return 0.0;
        }
        self.values[row as usize * self.q_nodes + l % self.q_nodes]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl MarginalDistribution {
    pub fn value(&self, m: i64) -> f64 {
        let row = m + self.window;
        if row < 0 || row >= self.values.len() as i64 {
            return 0.0;
        }
        self.values[row as usize]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// State fully concentrated at the origin site with the given coin spinor.
pub fn localized_state(
    q_nodes: usize,
    window: i64,
    coin: &BlochInitialState,
) -> Result<LatticeState> {
    if q_nodes < 1 {
        return Err(WalkError::InvalidArgument(
            "Q must be at least 1".to_string(),
        ));
    }
    if window < 0 {
        return Err(WalkError::InvalidArgument(format!(
            "window must be non-negative, got {window}"
        )));
    }
    let spinor = coin.spinor()?;
    let rows = (2 * window + 1) as usize;
    let mut amps = vec![Complex64::new(0.0, 0.0); rows * q_nodes * 2];
    let origin = (window as usize * q_nodes) * 2;
    amps[origin] = spinor[0];
    amps[origin + 1] = spinor[1];
    Ok(LatticeState {
        q_nodes,
        window,
        amps,
    })
}

impl LatticeState {
    /// Builds a state from raw amplitudes (m-major, then l, then spin) and
    /// normalizes it. Rejects wrong lengths, non-finite entries, zero norm.
    pub fn from_amplitudes(
        q_nodes: usize,
        window: i64,
        mut amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        if q_nodes < 1 {
            return Err(WalkError::InvalidArgument(
                "Q must be at least 1".to_string(),
            ));
        }
        if window < 0 {
            return Err(WalkError::InvalidArgument(format!(
                "window must be non-negative, got {window}"
            )));
        }
        let expect = (2 * window + 1) as usize * q_nodes * 2;
        if amplitudes.len() != expect {
            return Err(WalkError::InvalidArgument(format!(
                "amplitude vector has length {}, expected {expect}",
                amplitudes.len()
            )));
        }
        let mut norm_sqr = 0.0;
        for a in &amplitudes {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(WalkError::InvalidArgument(
                    "amplitudes must be finite".to_string(),
                ));
            }
            norm_sqr += a.norm_sqr();
        }
        if norm_sqr <= 0.0 {
            return Err(WalkError::InvalidArgument(
                "amplitude vector has zero norm".to_string(),
            ));
        }
        let inv = 1.0 / norm_sqr.sqrt();
        for a in &mut amplitudes {
            *a *= inv;
        }
        Ok(Self {
            q_nodes,
            window,
            amps: amplitudes,
        })
    }

    pub(crate) fn from_raw(q_nodes: usize, window: i64, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), (2 * window + 1) as usize * q_nodes * 2);
        Self {
            q_nodes,
            window,
            amps,
        }
    }

    pub fn q_nodes(&self) -> usize {
        self.q_nodes
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn rows(&self) -> usize {
        (2 * self.window + 1) as usize
    }

    pub(crate) fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    fn idx(&self, row: usize, l: usize, s: usize) -> usize {
        (row * self.q_nodes + l) * 2 + s
    }

    /// Amplitude at (m, l, s); l is taken modulo Q (periodicity is
    /// structural) and positions outside the window hold exact zeros.
    pub fn amplitude(&self, m: i64, l: i64, s: usize) -> Complex64 {
        assert!(s < 2, "spin index must be 0 (s=+1) or 1 (s=-1)");
        if m < -self.window || m > self.window {
            return Complex64::new(0.0, 0.0);
        }
        let row = (m + self.window) as usize;
        let l = l.rem_euclid(self.q_nodes as i64) as usize;
        self.amps[self.idx(row, l, s)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |m| carrying nonzero amplitude, or None for the zero field.
    pub fn max_support(&self) -> Option<i64> {
        let mut best: Option<i64> = None;
        for row in 0..self.rows() {
            let base = row * self.q_nodes * 2;
            let occupied = self.amps[base..base + self.q_nodes * 2]
                .iter()
                .any(|a| a.re != 0.0 || a.im != 0.0);
            if occupied {
                let m = (row as i64 - self.window).abs();
                best = Some(best.map_or(m, |b| b.max(m)));
            }
        }
        best
    }

    /// One walk step: coin-x, shift-x, coin-y, shift-y (rightmost first).
    ///
    /// Errors with window-overflow if any amplitude sits at m = -M or +M
    /// just before the x shift; succeeding therefore certifies that nothing
    /// was truncated.
    pub fn step(&self, coin_x: &ComplexMatrix2, coin_y: &ComplexMatrix2) -> Result<Self> {
        let q = self.q_nodes;
        let rows = self.rows();
        let n = self.amps.len();

        // Coin on the x axis, site local.
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        for site in 0..rows * q {
            let i = site * 2;
            let up = self.amps[i];
            let dn = self.amps[i + 1];
            a[i] = coin_x.a11 * up + coin_x.a12 * dn;
            a[i + 1] = coin_x.a21 * up + coin_x.a22 * dn;
        }

        // Boundary rows must be empty before shifting in x.
        let row_occupied = |row: usize| {
            let base = row * q * 2;
            a[base..base + q * 2].iter().any(|z| z.re != 0.0 || z.im != 0.0)
        };
        if row_occupied(0) || row_occupied(rows - 1) {
            return Err(WalkError::WindowOverflow {
                window: self.window,
            });
        }

        // Shift in x: spin +1 moves to m+1, spin -1 to m-1.
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for row in 1..rows {
            for l in 0..q {
                b[self.idx(row, l, 0)] = a[self.idx(row - 1, l, 0)];
            }
        }
        for row in 0..rows - 1 {
            for l in 0..q {
                b[self.idx(row, l, 1)] = a[self.idx(row + 1, l, 1)];
            }
        }

        // Coin on the y axis, then the periodic shift in l.
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for row in 0..rows {
            for l in 0..q {
                let i = self.idx(row, l, 0);
                let up = coin_y.a11 * b[i] + coin_y.a12 * b[i + 1];
                let dn = coin_y.a21 * b[i] + coin_y.a22 * b[i + 1];
                out[self.idx(row, (l + 1) % q, 0)] = up;
                out[self.idx(row, (l + q - 1) % q, 1)] = dn;
            }
        }

        Ok(Self {
            q_nodes: q,
            window: self.window,
            amps: out,
        })
    }

    /// Applies `step` the given number of times.
    pub fn evolve(
        &self,
        steps: usize,
        coin_x: &ComplexMatrix2,
        coin_y: &ComplexMatrix2,
    ) -> Result<Self> {
        let mut state = self.clone();
        for _ in 0..steps {
            state = state.step(coin_x, coin_y)?;
        }
        Ok(state)
    }

    /// Joint distribution P(m, l) = sum_s |psi_{m,l;s}|^2.
    pub fn probability(&self) -> ProbabilityGrid {
        let q = self.q_nodes;
        let mut values = Vec::with_capacity(self.rows() * q);
        for site in 0..self.rows() * q {
            let i = site * 2;
            values.push(self.amps[i].norm_sqr() + self.amps[i + 1].norm_sqr());
        }
        ProbabilityGrid {
            q_nodes: q,
            window: self.window,
            values,
        }
    }

    /// Marginal P(m) = sum_l P(m, l), folded in ascending l order so that
    /// summing the exported joint table reproduces it bit for bit.
    pub fn marginal_probability(&self) -> MarginalDistribution {
        let joint = self.probability();
        let q = self.q_nodes;
        let values = (0..self.rows())
            .map(|row| {
                let mut acc = 0.0;
                for l in 0..q {
                    acc += joint.values[row * q + l];
                }
                acc
            })
            .collect();
        MarginalDistribution {
            window: self.window,
            values,
        }
    }

    /// Same field moved by `shift` sites around the cylinder.
    pub fn translated_y(&self, shift: i64) -> Self {
        let q = self.q_nodes as i64;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for row in 0..self.rows() {
            for l in 0..self.q_nodes {
                let dst = (l as i64 + shift).rem_euclid(q) as usize;
                for s in 0..2 {
                    amps[self.idx(row, dst, s)] = self.amps[self.idx(row, l, s)];
                }
            }
        }
        Self {
            q_nodes: self.q_nodes,
            window: self.window,
            amps,
        }
    }
}
