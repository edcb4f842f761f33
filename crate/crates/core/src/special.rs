//! Error function helpers.

use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse of [`erf`] on (-1, 1). Returns ±∞ at ±1 and NaN outside.
///
/// Bisection on the complementary function followed by Newton polishing,
/// which keeps full relative accuracy in the tail where `1 - y` is small.
pub fn erf_inv(y: f64) -> f64 {
    if y.is_nan() || !(-1.0..=1.0).contains(&y) {
        return f64::NAN;
    }
    if y == 1.0 {
        return f64::INFINITY;
    }
    if y == -1.0 {
        return f64::NEG_INFINITY;
    }
    if y == 0.0 {
        return 0.0;
    }
    if y < 0.0 {
        return -erf_inv(-y);
    }
    // Solve erfc(x) = c on [0, 27]; erfc(27) underflows to zero.
    let c = 1.0 - y;
    let (mut lo, mut hi) = (0.0_f64, 27.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if erfc(mid) > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..2 {
        let slope = -FRAC_2_SQRT_PI * (-x * x).exp();
        if slope == 0.0 {
            break;
        }
        let step = (erfc(x) - c) / slope;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// CDF of the normal distribution with the given mean and standard deviation.
///
/// A zero standard deviation is treated as a point mass at `mean`.
pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return if x >= mean { 1.0 } else { 0.0 };
    }
    0.5 * erfc(-(x - mean) / (sd * SQRT_2))
}
