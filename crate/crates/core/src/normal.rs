//! Standard normal distribution helpers.
//!
//! Upper tails go through `erfc` directly so that probabilities deep in either
//! tail keep full relative precision.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::SQRT_2;

/// Standard normal CDF.
pub fn cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal survival function `1 - cdf(x)`.
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// `cdf(b) - cdf(a)` for `a <= b`, computed on the side that avoids cancellation.
pub fn interval(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a >= 0.0 {
        (sf(a) - sf(b)).max(0.0)
    } else {
        (cdf(b) - cdf(a)).max(0.0)
    }
}

/// Inverse of the survival function: the `x` with `sf(x) = p`.
pub fn isf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::INFINITY;
    }
    if p >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let mut x = SQRT_2 * erfc_inv(2.0 * p);
    // The seed is only good to about 1e-9; polish against the accurate erfc.
    for _ in 0..2 {
        let d = pdf(x);
        if d <= 0.0 {
            break;
        }
        x += (sf(x) - p) / d;
    }
    x
}

/// Inverse CDF.
pub fn quantile(p: f64) -> f64 {
    -isf(p)
}

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
