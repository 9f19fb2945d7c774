//! Standard normal distribution.
//!
//! `erf` uses the everywhere-positive power series
//! `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (2n+1)!!` for
//! `|x| < 2.5`; `erfc` switches to the Laplace continued fraction
//! `erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`
//! from `x >= 2`. Both are summed to full double precision; the absolute error
//! of [`cdf`] is below 1e-15 on the whole real line and the relative error in
//! the tails stays near 1e-14. `exp(-x^2)` is evaluated with a split of `x`
//! so that the large exponent does not lose bits.
//!
//! [`quantile`] inverts [`cdf`] by safeguarded Newton iteration on
//! `ln Phi(x) - ln p` inside a shrinking bisection bracket.

use crate::math::{exp, ln, sqrt};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;
const SERIES_LIMIT: f64 = 2.5;
// erfc switches to the continued fraction earlier than erf does, keeping
// its relative error small where 1 - erf(x) would cancel.
const CF_LIMIT: f64 = 2.0;

/// `exp(-x * x)` without the rounding error of forming `x * x` first.
fn exp_neg_sq(x: f64) -> f64 {
    let x = x.abs();
    if x > 27.3 {
        return 0.0;
    }
    // hi carries at most 26 significant bits so hi*hi is exact.
    let hi = libm::trunc(x * 67_108_864.0) / 67_108_864.0;
    let lo = x - hi;
    exp(-hi * hi) * exp(-lo * (x + hi))
}

fn erf_series(x: f64) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-17 * sum.abs() {
        n += 1.0;
        term *= two_x2 / (2.0 * n + 1.0);
        sum += term;
    }
    2.0 * FRAC_1_SQRT_PI * exp_neg_sq(x) * sum
}

/// Continued fraction for `erfc(x)`, used for `x >= CF_LIMIT`.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    // Modified Lentz evaluation of b0 + a1/(b1 + a2/(b2 + ...)),
    // with b_n = x and a_n = n/2.
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = n as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI * exp_neg_sq(x) / f
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < SERIES_LIMIT {
        erf_series(x)
    } else if x > 0.0 {
        1.0 - erfc_cf(x)
    } else {
        erfc_cf(-x) - 1.0
    }
}

/// Complementary error function `1 - erf(x)`, accurate in the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= CF_LIMIT {
        erfc_cf(x)
    } else if x > -CF_LIMIT {
        1.0 - erf_series(x)
    } else {
        2.0 - erfc_cf(-x)
    }
}

/// Standard normal density.
#[inline]
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * exp_neg_sq(x * FRAC_1_SQRT_2)
}

/// Standard normal distribution function `Phi(x)`.
pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)` without cancellation.
#[inline]
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// `Phi(hi) - Phi(lo)` for `lo <= hi`, evaluated on whichever tail avoids
/// cancellation. Infinite endpoints are allowed.
pub fn interval_prob(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        sf(lo) - sf(hi)
    } else if hi <= 0.0 {
        cdf(hi) - cdf(lo)
    } else {
        1.0 - cdf(lo) - sf(hi)
    }
}

/// Inverse of [`cdf`]. Returns `-inf`/`+inf` at 0/1 and NaN outside `[0, 1]`.
pub fn quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        // 1 - p is exact for p in (0.5, 1).
        return -lower_quantile(1.0 - p);
    }
    lower_quantile(p)
}

fn lower_quantile(p: f64) -> f64 {
    let target = ln(p);
    let (mut lo, mut hi) = (-39.0_f64, 0.0_f64);
    let mut x = if p > 0.05 {
        (p - 0.5) * 2.506_628_274_631_000_5
    } else {
        let t = -2.0 * target;
        -sqrt(t - ln(t) - 1.837_877_066_409_345_5)
    };
    x = x.clamp(lo, hi);
    for _ in 0..200 {
        let c = cdf(x);
        let f = if c > 0.0 { ln(c) - target } else { f64::NEG_INFINITY };
        if f == 0.0 {
            return x;
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = if c > 0.0 { x - f * c / pdf(x) } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || hi - lo <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}
