//! Eigenvalues and positive-definiteness certification.
//!
//! Eigenvalues come from nalgebra's dense symmetric solver (Householder
//! tridiagonalization followed by implicit QR). An eigenvalue counts as zero
//! when `|λ| <= 1e-14 · n · max|λ|`.
//!
//! Computed null eigenvalues of correlation matrices sit at a few `1e-15`,
//! while the smallest eigenvalue of a bootstrap average that has just become
//! positive-definite is typically `1e-10 .. 1e-5`. A threshold of
//! `1e-8 · n · max|λ|` would misclassify most of those as zero.

use nalgebra::DMatrix;

use crate::corr::{check_symmetric, CorrelationMatrix};
use crate::error::Result;

/// Relative factor in the zero threshold `ZERO_REL · n · max|λ|`.
pub const ZERO_REL: f64 = 1e-14;

/// Relative shift for the Cholesky certificate, `CHOLESKY_REL · n · ‖A‖∞`.
/// Large enough that rounding in the factorization cannot fake success.
pub const CHOLESKY_REL: f64 = 1e-8;

/// Largest asymmetry accepted by the eigensolver entry points.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of a symmetric matrix, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    zero_tolerance: f64,
    zero_count: usize,
}

impl Spectrum {
    fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let n = eigenvalues.len();
        let radius = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
        let zero_tolerance = ZERO_REL * n as f64 * radius;
        let zero_count = eigenvalues
            .iter()
            .filter(|l| l.abs() <= zero_tolerance)
            .count();
        Spectrum {
            eigenvalues,
            zero_tolerance,
            zero_count,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn zero_tolerance(&self) -> f64 {
        self.zero_tolerance
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    /// Smallest eigenvalue λ0.
    pub fn smallest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// λ0 above the zero band. Values inside the band count as not
    /// positive-definite.
    pub fn is_positive_definite(&self) -> bool {
        self.smallest() > self.zero_tolerance
    }
}

/// All eigenvalues of a symmetric matrix.
pub fn symmetric_spectrum(matrix: &DMatrix<f64>) -> Result<Spectrum> {
    check_symmetric(matrix, SYMMETRY_TOL)?;
    let values = matrix.clone().symmetric_eigenvalues();
    Ok(Spectrum::from_eigenvalues(values.iter().copied().collect()))
}

/// All eigenvalues of a correlation matrix.
pub fn eigenvalues(matrix: &CorrelationMatrix) -> Result<Spectrum> {
    symmetric_spectrum(matrix.values())
}

/// Eigensolver verdict: `(λ0 > zero_tolerance, λ0)`.
pub fn is_positive_definite(matrix: &CorrelationMatrix) -> Result<(bool, f64)> {
    let s = eigenvalues(matrix)?;
    Ok((s.is_positive_definite(), s.smallest()))
}

/// Verdict through a Cholesky factorization of `A - τ I` with
/// `τ = CHOLESKY_REL · n · ‖A‖∞`, which exceeds the zero threshold since
/// `max|λ| <= ‖A‖∞`. Success proves `λ0 > τ`; on failure the eigensolver
/// decides.
pub fn is_positive_definite_fast(matrix: &CorrelationMatrix) -> Result<bool> {
    let m = matrix.values();
    check_symmetric(m, SYMMETRY_TOL)?;
    if cholesky_certifies(m) {
        return Ok(true);
    }
    Ok(is_positive_definite(matrix)?.0)
}

fn cholesky_certifies(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    let inf_norm = m
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let tau = CHOLESKY_REL * n as f64 * inf_norm;
    let shifted = m - DMatrix::<f64>::identity(n, n) * tau;
    shifted.cholesky().is_some()
}
