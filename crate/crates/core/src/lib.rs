//! Simulation and analysis of a discrete-time quantum walk on the cylinder
//! Z x Z/Q: one open direction, one closed direction of circumference Q, and
//! a single two-level coin driving alternate coined shifts along x then y.
//!
//! The crate provides two independent evolution engines that cross-validate
//! each other: a real-space engine ([`lattice`]) that applies coins and
//! shifts site by site, and a momentum-space engine ([`spectral`]) that
//! diagonalizes the one-step Bloch matrix mode by mode. On top of these sit
//! the analysis layers: band structure and its census over the quantized
//! transverse momenta ([`spectral`]), coin-position entanglement dynamics
//! and their closed-form long-time averages ([`entanglement`]), and the
//! small-momentum Dirac limit in which the transverse momentum plays the
//! role of a relativistic mass ([`continuum`]). [`export`] renders results
//! as CSV tables and JSON summaries with reproducible formatting.

pub mod coin;
pub mod continuum;
pub mod entanglement;
pub mod error;
pub mod export;
pub mod lattice;
pub mod mat2;
pub mod spectral;

pub use coin::{coin_matrix, hadamard_coin, CoinAngles};
pub use continuum::{
    continuum_convergence, dirac_cone_error, dirac_generator, dirac_reference_propagator,
    ConvergenceReport, ERROR_FLOOR,
};
pub use entanglement::{
    asymptotic_entries, asymptotic_entropy_infinite, asymptotic_rho, asymptotic_rho_infinite,
    entropy_series, entropy_series_with_coins, reduced_density_matrix, time_averaged_rho,
    AsymptoticEntries, AsymptoticRho, EntropyRecord,
};
pub use error::{Result, WalkError};
pub use lattice::{
    localized_state, BlochInitialState, LatticeState, MarginalDistribution, ProbabilityGrid,
};
pub use mat2::{von_neumann_entropy, ComplexMatrix2};
pub use spectral::{
    band_census, band_point, band_point_general, dispersion, eigensystem, eigensystem_general,
    group_velocity, group_velocity_general, midpoint_k_grid, momentum_evolve,
    momentum_evolve_general, spectral_power, spectral_power_general, walk_matrix, BandCensus,
    BandPoint, QuasiMomentumGrid,
};
