//! Closed-form predictions for the averaged matrix.
//!
//! Summing the per-replicate zero counts over `k` replicates gives
//! `ζ ~ N(k (n + 1 - μ), √k σ)`. The average is positive-definite when
//! `ζ <= (k - 1) n`, which yields
//!
//! ```text
//! P(λ0 > 0) ≈ ½ [1 + erf(((μ - 1) k - n) / (σ √(2k)))]
//! ```
//!
//! with `μ`, `σ²` the moments of the distinct-column count for `t`.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::occupancy::{approx_moments, exact_moments};
use crate::special::{erf, erf_inv, erfc};

/// Which moments of the distinct-column count feed the formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentSource {
    /// Closed-form exact moments; matches simulations at small `t`.
    #[default]
    Exact,
    /// Large-`t` linear approximations.
    Approximate,
}

impl MomentSource {
    /// `(μ - 1, σ²)` for `t >= 2`.
    fn shifted_moments(self, t: usize) -> Result<(f64, f64)> {
        if t < 2 {
            return Err(Error::domain(format!(
                "predictions need t >= 2 (σ(t) = 0 at t = {t})"
            )));
        }
        let (mu, var) = match self {
            MomentSource::Exact => exact_moments(t)?,
            MomentSource::Approximate => approx_moments(t),
        };
        if mu <= 1.0 || var <= 0.0 {
            return Err(Error::domain(format!(
                "degenerate moments at t = {t}: mean {mu}, variance {var}"
            )));
        }
        Ok((mu - 1.0, var))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    Ok(())
}

/// Argument of the error function in the positive-definiteness probability.
pub fn erf_argument(n: usize, t: usize, k: f64, moments: MomentSource) -> Result<f64> {
    check_n(n)?;
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::domain(format!("k must be positive, got {k}")));
    }
    let (m, var) = moments.shifted_moments(t)?;
    Ok((m * k - n as f64) / (var.sqrt() * (2.0 * k).sqrt()))
}

/// Predicted probability that the average of `k` replicates is
/// positive-definite, using exact moments. `k` may be fractional.
pub fn prob_pd(n: usize, t: usize, k: f64) -> Result<f64> {
    prob_pd_with(n, t, k, MomentSource::Exact)
}

pub fn prob_pd_with(n: usize, t: usize, k: f64, moments: MomentSource) -> Result<f64> {
    let x = erf_argument(n, t, k, moments)?;
    Ok((0.5 * (1.0 + erf(x))).clamp(0.0, 1.0))
}

/// Replicate count at which the erf argument equals `a`.
///
/// Root of `(μ-1) k - n = a σ √(2k)`: the larger root of the squared
/// quadratic for `a >= 0`, the smaller one for `a < 0`.
pub fn k_at_argument(n: usize, t: usize, a: f64, moments: MomentSource) -> Result<f64> {
    check_n(n)?;
    if !a.is_finite() {
        return Err(Error::domain(format!("a must be finite, got {a}")));
    }
    let (m, var) = moments.shifted_moments(t)?;
    let nf = n as f64;
    let a2s = a * a * var;
    let disc = (a2s * a2s + 2.0 * a2s * m * nf).sqrt();
    Ok((a2s + m * nf + a.signum() * disc) / (m * m))
}

/// Replicates needed so the predicted probability reaches `1 - α` with
/// `α = 1 - erf(a)`:
///
/// ```text
/// k⁺(a) = (a² σ² + (μ-1) n + √(a⁴ σ⁴ + 2 a² σ² (μ-1) n)) / (μ-1)²
/// ```
pub fn k_plus(n: usize, t: usize, a: f64) -> Result<f64> {
    k_plus_with(n, t, a, MomentSource::Exact)
}

pub fn k_plus_with(n: usize, t: usize, a: f64, moments: MomentSource) -> Result<f64> {
    if a.is_nan() || a < 0.0 {
        return Err(Error::domain(format!("a must be non-negative, got {a}")));
    }
    k_at_argument(n, t, a, moments)
}

/// Replicate count at which the predicted probability equals `p`.
pub fn k_for_probability(n: usize, t: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("probability must be in (0, 1), got {p}")));
    }
    k_at_argument(n, t, erf_inv(2.0 * p - 1.0), MomentSource::Exact)
}

/// Inflection point of the probability curve with `t = n/q` and the
/// large-`t` moments: `k* = 2 e n q / (2 (e-1) n + (1 - 2e) q)`.
pub fn k_star(n: usize, q: f64) -> Result<f64> {
    check_n(n)?;
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::domain(format!("q must be positive, got {q}")));
    }
    let nf = n as f64;
    let denom = 2.0 * (E - 1.0) * nf + (1.0 - 2.0 * E) * q;
    if denom <= 0.0 {
        return Err(Error::domain(format!(
            "k* undefined for n = {n}, q = {q}: denominator {denom} <= 0"
        )));
    }
    Ok(2.0 * E * nf * q / denom)
}

/// Large-system position of the transition, `e/(e-1) · q ≈ 1.582 q`.
pub fn k_limit(q: f64) -> f64 {
    E / (E - 1.0) * q
}

/// `a = erf⁻¹(1 - α)`; α = 0.01 gives a ≈ 1.82.
pub fn alpha_to_a(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must be in (0, 1], got {alpha}")));
    }
    Ok(erf_inv(1.0 - alpha))
}

/// `α = 1 - erf(a)`.
pub fn a_to_alpha(a: f64) -> f64 {
    erfc(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPrediction {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub probability: f64,
}

impl PdPrediction {
    pub fn new(n: usize, t: usize, k: usize) -> Result<Self> {
        Ok(PdPrediction {
            n,
            t,
            k,
            probability: prob_pd(n, t, k as f64)?,
        })
    }
}

/// Replicate-count thresholds for one `(n, t, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapBudget {
    pub n: usize,
    pub t: usize,
    pub a: f64,
    pub k_plus: f64,
    pub k_star: f64,
    pub k_limit: f64,
    /// `k = n` always suffices.
    pub k_upper: usize,
}

impl BootstrapBudget {
    pub fn new(n: usize, t: usize, a: f64) -> Result<Self> {
        let q = n as f64 / t as f64;
        Ok(BootstrapBudget {
            n,
            t,
            a,
            k_plus: k_plus(n, t, a)?,
            k_star: k_star(n, q)?,
            k_limit: k_limit(q),
            k_upper: n,
        })
    }

    pub fn from_alpha(n: usize, t: usize, alpha: f64) -> Result<Self> {
        Self::new(n, t, alpha_to_a(alpha)?)
    }

    /// `min(ceil(k⁺), n)`, at least 1.
    pub fn recommended(&self) -> usize {
        (self.k_plus.ceil() as usize).clamp(1, self.k_upper.max(1))
    }
}
