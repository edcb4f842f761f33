//! Occupancy distribution of a bootstrap draw.
//!
//! Drawing `t` column indices with replacement from `t` columns leaves `u`
//! distinct indices. A replicate built from `u` distinct columns has rank
//! `min(n, u - 1)`, so the number of zero eigenvalues of its `n x n`
//! correlation matrix is `max(n + 1 - u, 0)`.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::special::normal_cdf;

/// Largest `t` accepted by [`occupancy_pmf`]; the table has `t` entries.
pub const MAX_T: usize = 100_000;

/// Exact distribution of the distinct-value count `u` for `t` draws from `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyDistribution {
    t: usize,
    pmf: Vec<f64>,
    mean: f64,
    variance: f64,
}

impl OccupancyDistribution {
    pub fn t(&self) -> usize {
        self.t
    }

    /// Probabilities for `u = 1..=t`; entry `i` holds `P(u = i + 1)`.
    ///
    /// Entries too small for binary64 are stored as `0.0`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `P(u)`, zero outside `1..=t`.
    pub fn prob(&self, u: usize) -> f64 {
        if u == 0 || u > self.t {
            0.0
        } else {
            self.pmf[u - 1]
        }
    }

    /// `P(U <= u)`.
    pub fn cdf(&self, u: usize) -> f64 {
        let upto = u.min(self.t);
        self.pmf[..upto].iter().sum::<f64>().min(1.0)
    }

    /// Closed-form mean.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Closed-form variance.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Mean and variance summed directly over the table.
    pub fn table_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, &p) in self.pmf.iter().enumerate() {
            let u = (i + 1) as f64;
            m1 += u * p;
            m2 += u * u * p;
        }
        (m1, m2 - m1 * m1)
    }
}

/// Exact PMF of the number of distinct values among `t` uniform draws from
/// `{1..t}`.
///
/// Uses the occupancy recurrence over throws,
/// `P(j+1, u) = P(j, u) * u/t + P(j, u-1) * (t-u+1)/t`,
/// which equals the Stirling-number form `S2(t,u) t! / (t^t (t-u)!)` but
/// never forms the huge intermediate integers.
pub fn occupancy_pmf(t: usize) -> Result<OccupancyDistribution> {
    if t == 0 || t > MAX_T {
        return Err(Error::domain(format!(
            "occupancy_pmf needs 1 <= t <= {MAX_T}, got t = {t}"
        )));
    }
    let tf = t as f64;
    // p[u] for u = 0..=t; after the first throw exactly one value is occupied.
    let mut p = vec![0.0; t + 1];
    p[1] = 1.0;
    for throws in 1..t {
        let top = (throws + 1).min(t);
        for u in (1..=top).rev() {
            let stay = p[u] * (u as f64 / tf);
            let grow = p[u - 1] * ((t - u + 1) as f64 / tf);
            p[u] = stay + grow;
        }
    }
    let (mean, variance) = exact_moments(t)?;
    p.remove(0);
    Ok(OccupancyDistribution {
        t,
        pmf: p,
        mean,
        variance,
    })
}

/// `(1 - 1/t)^t`-style powers evaluated as `exp(t * ln(1 - x))`.
fn pow_one_minus(x: f64, t: f64) -> f64 {
    (t * (-x).ln_1p()).exp()
}

/// Closed-form mean and variance of the distinct-value count.
///
/// `mean = t [1 - (1 - 1/t)^t]` and
/// `var = t (1-1/t)^t + t^2 (1-1/t)(1-2/t)^t - t^2 (1-1/t)^{2t}`.
/// The last two terms nearly cancel for large `t`; their difference is
/// computed as `(1-1/t)^{2t} * expm1(r)` to keep relative accuracy.
pub fn exact_moments(t: usize) -> Result<(f64, f64)> {
    if t == 0 {
        return Err(Error::domain("exact_moments needs t >= 1"));
    }
    if t == 1 {
        return Ok((1.0, 0.0));
    }
    let tf = t as f64;
    let inv = 1.0 / tf;
    let a = pow_one_minus(inv, tf);
    let mean = tf * (1.0 - a);
    // r = ln[(1-1/t)(1-2/t)^t / (1-1/t)^{2t}]
    let r = tf * ((-2.0 * inv).ln_1p() - 2.0 * (-inv).ln_1p()) + (-inv).ln_1p();
    let variance = tf * a + tf * tf * a * a * r.exp_m1();
    Ok((mean, variance.max(0.0)))
}

/// Large-`t` approximations of the mean and variance:
/// `(1 - 1/e) t + 1/(2e)` and `((e-2)/e^2) t + (3-e)/(2e^2)`.
///
/// Poor at tiny `t` (the mean at `t = 1` is about 0.816 instead of 1).
pub fn approx_moments(t: usize) -> (f64, f64) {
    let tf = t as f64;
    let mean = (1.0 - 1.0 / E) * tf + 1.0 / (2.0 * E);
    let variance = ((E - 2.0) / (E * E)) * tf + (3.0 - E) / (2.0 * E * E);
    (mean, variance)
}

/// Zero eigenvalues of an `n x n` correlation matrix built from `u` distinct
/// columns: `max(n + 1 - u, 0)`.
pub fn zero_count(n: usize, u: usize) -> usize {
    (n + 1).saturating_sub(u)
}

/// Normal model for the zero-eigenvalue count of one replicate.
///
/// The count is modeled as `N(n + 1 - mean(t), sd(t))` without the clamp at
/// zero, which is appropriate when `n` is well above `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEigenModel {
    pub n: usize,
    pub t: usize,
    pub mean_z: f64,
    pub sd_z: f64,
}

impl ZeroEigenModel {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("ZeroEigenModel needs n >= 1"));
        }
        let (mu, var) = exact_moments(t)?;
        Ok(ZeroEigenModel {
            n,
            t,
            mean_z: n as f64 + 1.0 - mu,
            sd_z: var.sqrt(),
        })
    }

    /// Mean and standard deviation of the zero count summed over `k`
    /// independent replicates.
    pub fn total_over(&self, k: f64) -> (f64, f64) {
        (k * self.mean_z, k.sqrt() * self.sd_z)
    }
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF of
/// `samples` and `N(mean, sd)`, taken over the sample points.
pub fn ks_distance_normal(samples: &[f64], mean: f64, sd: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("KS distance needs at least one sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("KS distance samples contain NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut dist: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let below = i as f64 / m;
        let at = j as f64 / m;
        let f = normal_cdf(x, mean, sd);
        dist = dist.max((at - f).abs()).max((below - f).abs());
        i = j;
    }
    Ok(dist)
}

/// KS distance between observed distinct-value counts and `N(mean(t), sd(t))`
/// with the closed-form moments.
pub fn occupancy_cdf_vs_normal(t: usize, samples: &[usize]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("occupancy_cdf_vs_normal needs samples"));
    }
    if let Some(&bad) = samples.iter().find(|&&u| u == 0 || u > t) {
        return Err(Error::domain(format!(
            "unique count {bad} is outside [1, {t}]"
        )));
    }
    let (mean, var) = exact_moments(t)?;
    let xs: Vec<f64> = samples.iter().map(|&u| u as f64).collect();
    ks_distance_normal(&xs, mean, var.sqrt())
}

/// KS distance between the distinct-count ECDF and the normal model with a
/// half-unit continuity correction, `sup_u |F(u) - Φ(u + ½)|` over the
/// observed values.
///
/// The uncorrected distance cannot drop below about half the largest PMF
/// value (≈ 0.064 at `t = 100`) because the ECDF steps on integers; this
/// variant measures the fit of the shape instead.
pub fn occupancy_cdf_vs_normal_corrected(t: usize, samples: &[usize]) -> Result<f64> {
    // validates samples
    occupancy_cdf_vs_normal(t, samples)?;
    let (mean, var) = exact_moments(t)?;
    let sd = var.sqrt();
    let mut hist = vec![0usize; t + 1];
    for &u in samples {
        hist[u] += 1;
    }
    let m = samples.len() as f64;
    let mut running = 0;
    let mut dist: f64 = 0.0;
    for (u, &c) in hist.iter().enumerate().skip(1) {
        running += c;
        if c > 0 {
            let f = running as f64 / m;
            dist = dist.max((f - normal_cdf(u as f64 + 0.5, mean, sd)).abs());
        }
    }
    Ok(dist)
}

/// `sup_u max(|F(u) - Φ(u)|, |F(u-1) - Φ(u)|)` over the support, with `F`
/// the exact occupancy CDF: the value the sampled KS distance converges to.
pub fn population_ks_distance(t: usize) -> Result<f64> {
    let dist = occupancy_pmf(t)?;
    let sd = dist.variance().sqrt();
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    for u in 1..=t {
        let p = dist.prob(u);
        let at = below + p;
        if p > 0.0 {
            let phi = normal_cdf(u as f64, dist.mean(), sd);
            sup = sup.max((at - phi).abs()).max((below - phi).abs());
        }
        below = at;
    }
    Ok(sup)
}
