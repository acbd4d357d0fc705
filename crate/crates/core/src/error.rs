//! Error taxonomy shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalkError {
    /// A caller-supplied value is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Amplitude reached the open-dimension window edge; a further x-shift
    /// would leak probability. The truncated walk is exact only while the
    /// support stays strictly inside the window.
    #[error("window overflow: nonzero amplitude at m = ±{window} before the x shift; enlarge the window")]
    WindowOverflow { window: i64 },

    /// The matrix handed to an entropy/density routine is not a density
    /// matrix within tolerance (Hermiticity, unit trace, positivity).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// The two bands touch at this point; eigenvectors are not unique.
    #[error("degenerate bands at (k={k}, q={q}): step eigenvalues coincide")]
    DegeneratePoint { k: f64, q: f64 },

    /// Group velocity dω/dk is singular where sin ω = 0 (band extrema).
    #[error("group velocity undefined at (k={k}, q={q}): band extremum, sin ω = 0")]
    UndefinedDerivative { k: f64, q: f64 },

    /// Wavepacket narrower than the lattice can resolve.
    #[error("wavepacket under-resolved: width {width} < {min_width} (4× the largest lattice spacing)")]
    UnderResolved { width: f64, min_width: f64 },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WalkError>;
