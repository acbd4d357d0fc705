//! Serialization of analysis results: CSV tables and JSON summaries.
//!
//! Floating-point CSV fields use 17 significant digits (scientific form),
//! enough to reproduce every f64 bit for bit on parse. JSON goes through
//! serde, which round-trips finite doubles and renders non-finite ones as
//! null. All outputs end with a trailing newline.

use std::io;

use num_complex::Complex64;
use serde_json::json;

use crate::continuum::ConvergenceReport;
use crate::entanglement::{AsymptoticRho, EntropyRecord};
use crate::lattice::{MarginalDistribution, ProbabilityGrid};
use crate::mat2::ComplexMatrix2;
use crate::spectral::BandCensus;

/// Formats a float with full round-trip precision.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `m,p` rows over the whole window.
pub fn write_marginal_csv<W: io::Write>(w: &mut W, marginal: &MarginalDistribution) -> io::Result<()> {
    writeln!(w, "m,p")?;
    for (row, p) in marginal.values.iter().enumerate() {
        let m = row as i64 - marginal.window;
        writeln!(w, "{m},{}", fmt_float(*p))?;
    }
    Ok(())
}

/// `m,l,p` rows, m outermost, both directions in ascending order.
pub fn write_joint_csv<W: io::Write>(w: &mut W, grid: &ProbabilityGrid) -> io::Result<()> {
    writeln!(w, "m,l,p")?;
    for (idx, p) in grid.values.iter().enumerate() {
        let m = (idx / grid.q_nodes) as i64 - grid.window;
        let l = idx % grid.q_nodes;
        writeln!(w, "{m},{l},{}", fmt_float(*p))?;
    }
    Ok(())
}

/// `k,q,omega_plus,omega_minus,group_velocity` rows.
pub fn write_band_csv<W: io::Write>(
    w: &mut W,
    rows: &[(f64, f64, f64, f64, f64)],
) -> io::Result<()> {
    writeln!(w, "k,q,omega_plus,omega_minus,group_velocity")?;
    for (k, q, wp, wm, v) in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_float(*k),
            fmt_float(*q),
            fmt_float(*wp),
            fmt_float(*wm),
            fmt_float(*v)
        )?;
    }
    Ok(())
}

/// `j,entropy` rows.
pub fn write_entropy_series_csv<W: io::Write>(
    w: &mut W,
    records: &[EntropyRecord],
) -> io::Result<()> {
    writeln!(w, "j,entropy")?;
    for r in records {
        writeln!(w, "{},{}", r.step, fmt_float(r.entropy))?;
    }
    Ok(())
}

/// `theta,phi,entropy` rows.
pub fn write_bloch_scan_csv<W: io::Write>(w: &mut W, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(w, "theta,phi,entropy")?;
    for (theta, phi, s) in rows {
        writeln!(w, "{},{},{}", fmt_float(*theta), fmt_float(*phi), fmt_float(*s))?;
    }
    Ok(())
}

/// `epsilon,error` rows.
pub fn write_convergence_csv<W: io::Write>(
    w: &mut W,
    report: &ConvergenceReport,
) -> io::Result<()> {
    writeln!(w, "epsilon,error")?;
    for (eps, err) in report.epsilons.iter().zip(&report.errors) {
        writeln!(w, "{},{}", fmt_float(*eps), fmt_float(*err))?;
    }
    Ok(())
}

/// Band census as a single-line JSON object.
pub fn census_json_string(census: &BandCensus) -> String {
    let mut s = serde_json::to_string(census).expect("census serializes");
    s.push('\n');
    s
}

/// Convergence report as a single-line JSON object; an infinite fitted
/// order appears as null.
pub fn convergence_json_string(report: &ConvergenceReport) -> String {
    let mut s = serde_json::to_string(report).expect("report serializes");
    s.push('\n');
    s
}

fn complex_pair(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn matrix_entries(m: &ComplexMatrix2) -> serde_json::Value {
    json!([
        [complex_pair(m.a11), complex_pair(m.a12)],
        [complex_pair(m.a21), complex_pair(m.a22)],
    ])
}

/// Long-time coin-state report: the finite-Q average (entries as
/// [re, im] pairs in row-major order), its entropy and flat-band flag, and
/// the infinite-circumference comparison point.
pub fn asymptotic_json_string(
    q_nodes: usize,
    theta: f64,
    phi: f64,
    finite: &AsymptoticRho,
    entropy: f64,
    rho_infinite: &ComplexMatrix2,
    entropy_infinite: f64,
) -> String {
    let value = json!({
        "Q": q_nodes,
        "theta": theta,
        "phi": phi,
        "rho": matrix_entries(&finite.rho),
        "entropy": entropy,
        "flat_band_warning": finite.flat_band_warning,
        "rho_infinite": matrix_entries(rho_infinite),
        "entropy_infinite": entropy_infinite,
    });
    let mut s = serde_json::to_string(&value).expect("report serializes");
    s.push('\n');
    s
}
