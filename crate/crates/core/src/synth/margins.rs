//! Bounded marginal families whose clipped moments have closed forms.

use thiserror::Error;

use crate::math::{exp, ln, sqrt};
use crate::normal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginFamily {
    /// `min + exp(mu + sigma z)`, clipped at `max`.
    ShiftedLognormal,
    /// `mu + sigma z`, clipped to `[min, max]`.
    ClippedNormal,
}

/// Target moments and support of one generated column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginTarget {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub family: MarginFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("no {family:?} margin on [{min}, {max}] has mean {mean} and sd {sd}")]
pub struct MarginUnattainable {
    pub family: MarginFamily,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

/// A calibrated margin, applied to a standard normal draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub family: MarginFamily,
    pub mu: f64,
    pub sigma: f64,
    pub min: f64,
    pub max: f64,
}

impl Margin {
    pub fn apply(&self, z: f64) -> f64 {
        match self.family {
            MarginFamily::ShiftedLognormal => (self.min + exp(self.mu + self.sigma * z)).min(self.max),
            MarginFamily::ClippedNormal => (self.mu + self.sigma * z).clamp(self.min, self.max),
        }
    }

    /// Exact mean and sd of [`Margin::apply`] under `z ~ N(0, 1)`.
    pub fn moments(&self) -> (f64, f64) {
        let (m1, m2) = match self.family {
            MarginFamily::ShiftedLognormal => lognormal_moments(self.mu, self.sigma, self.max - self.min),
            MarginFamily::ClippedNormal => clipped_normal_moments(self.mu, self.sigma, self.min, self.max),
        };
        let mean = match self.family {
            MarginFamily::ShiftedLognormal => self.min + m1,
            MarginFamily::ClippedNormal => m1,
        };
        (mean, sqrt((m2 - m1 * m1).max(0.0)))
    }
}

/// First two raw moments of `min(exp(mu + s z), c)`.
fn lognormal_moments(mu: f64, s: f64, c: f64) -> (f64, f64) {
    let u = (ln(c) - mu) / s;
    let above = normal::sf(u);
    let m1 = exp(mu + 0.5 * s * s) * normal::cdf(u - s) + c * above;
    let m2 = exp(2.0 * mu + 2.0 * s * s) * normal::cdf(u - 2.0 * s) + c * c * above;
    (m1, m2)
}

/// First two raw moments of `clamp(mu + s z, lo, hi)`.
fn clipped_normal_moments(mu: f64, s: f64, lo: f64, hi: f64) -> (f64, f64) {
    let a = (lo - mu) / s;
    let b = (hi - mu) / s;
    let (pa, pb) = (normal::cdf(a), normal::sf(b));
    let inner = normal::interval_prob(a, b);
    let (da, db) = (normal::pdf(a), normal::pdf(b));
    let m1 = lo * pa + hi * pb + mu * inner + s * (da - db);
    let m2 =
        lo * lo * pa + hi * hi * pb + (mu * mu + s * s) * inner + 2.0 * mu * s * (da - db) + s * s * (a * da - b * db);
    (m1, m2)
}

fn bisect(mut lo: f64, mut hi: f64, increasing_gap: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if increasing_gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Solve for `(mu, sigma)` reproducing the target mean and sd exactly.
///
/// The location is solved for each trial spread so the mean always matches;
/// the spread is then bisected on the sd, which increases with it.
pub fn calibrate(target: &MarginTarget) -> Result<Margin, MarginUnattainable> {
    let fail = MarginUnattainable {
        family: target.family,
        mean: target.mean,
        sd: target.sd,
        min: target.min,
        max: target.max,
    };
    if !(target.min < target.mean && target.mean < target.max && target.sd > 0.0) {
        return Err(fail);
    }
    let width = target.max - target.min;
    let location_for = |sigma: f64| -> f64 {
        let (lo, hi) = match target.family {
            MarginFamily::ShiftedLognormal => (ln(width) - 60.0, ln(width) + 60.0),
            MarginFamily::ClippedNormal => (target.min - 60.0 * width, target.max + 60.0 * width),
        };
        bisect(lo, hi, |mu| make(target, mu, sigma).moments().0 - target.mean)
    };
    let sd_gap = |sigma: f64| make(target, location_for(sigma), sigma).moments().1 - target.sd;
    let (s_lo, s_hi) = match target.family {
        MarginFamily::ShiftedLognormal => (1e-4, 8.0),
        MarginFamily::ClippedNormal => (1e-6 * width, 100.0 * width),
    };
    if sd_gap(s_lo) > 0.0 || sd_gap(s_hi) < 0.0 {
        return Err(fail);
    }
    let sigma = bisect(s_lo, s_hi, sd_gap);
    let margin = make(target, location_for(sigma), sigma);
    let (mean, sd) = margin.moments();
    if (mean - target.mean).abs() > 1e-9 * target.mean.abs().max(1.0) || (sd - target.sd).abs() > 1e-9 * target.sd {
        return Err(fail);
    }
    Ok(margin)
}

fn make(target: &MarginTarget, mu: f64, sigma: f64) -> Margin {
    Margin { family: target.family, mu, sigma, min: target.min, max: target.max }
}
