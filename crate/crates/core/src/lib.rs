//! Regularization of singular Pearson correlation matrices by bootstrap
//! averaging.
//!
//! When a data matrix has more objects `n` than features `t`, its correlation
//! matrix has rank at most `t - 1` and cannot be inverted. Averaging the
//! correlation matrices of `k` column-resampled copies of the data fills the
//! null space, and the average becomes positive-definite once `k` exceeds a
//! threshold close to `e/(e-1) * n/t`.
//!
//! The crate is organized as:
//!
//! - [`occupancy`]: distribution of the number of distinct columns in one
//!   bootstrap draw, and the zero-eigenvalue count it induces.
//! - [`corr`]: Pearson correlation, bootstrap replicates and the averaged
//!   matrix.
//! - [`spectral`]: symmetric eigenvalues, zero counting and positive-definiteness
//!   certification.
//! - [`predictor`]: closed-form probability of positive-definiteness and the
//!   bootstrap budget.
//! - [`sim`]: Monte Carlo harness comparing observations with predictions.

pub mod corr;
pub mod error;
pub mod occupancy;
pub mod predictor;
pub mod rng;
pub mod sim;
pub mod special;
pub mod spectral;

pub use corr::{
    average_correlation, bootstrap_replicate, draw_bootstrap_index, pearson, AverageCorrelation,
    BootstrapIndex, CorrelationMatrix, CorrelationSource, DataMatrix, Replicate,
};
pub use error::{Error, Result};
pub use occupancy::{
    approx_moments, exact_moments, occupancy_cdf_vs_normal, occupancy_cdf_vs_normal_corrected,
    occupancy_pmf, population_ks_distance, zero_count,
    OccupancyDistribution, ZeroEigenModel,
};
pub use predictor::{
    alpha_to_a, a_to_alpha, k_limit, k_plus, k_star, prob_pd, BootstrapBudget, MomentSource,
    PdPrediction,
};
pub use sim::{
    check_zeta_condition, generate_data, run_occupancy_sweep, run_pd_sweep, OccupancySweep,
    SimulationConfig, SimulationReport, SweepRecord, ZetaRecord,
};
pub use spectral::{eigenvalues, is_positive_definite, is_positive_definite_fast, Spectrum};
