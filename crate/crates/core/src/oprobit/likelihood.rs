use alloc::vec;
use alloc::vec::Vec;

use super::OrdinalData;
use crate::math::{exp, ln};
use crate::normal;

/// Class probabilities below this are replaced by it before taking logs.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodValue {
    pub value: f64,
    /// Observations whose probability hit the floor.
    pub floored: usize,
}

pub(crate) fn dot(x: &[f64], beta: &[f64]) -> f64 {
    x.iter().zip(beta).map(|(a, b)| a * b).sum()
}

/// Natural thresholds from the unconstrained tail of `theta`.
fn thresholds(theta: &[f64], n_cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(theta.len() - n_cols);
    let mut c = theta[n_cols];
    out.push(c);
    for t in &theta[n_cols + 1..] {
        c += exp(*t);
        out.push(c);
    }
    out
}

/// Latent-interval endpoints `(c_{k-1} - eta, c_k - eta)` for class `k`.
#[inline]
fn bounds(cuts: &[f64], k: usize, eta: f64) -> (f64, f64) {
    let lo = if k == 1 { f64::NEG_INFINITY } else { cuts[k - 2] - eta };
    let hi = if k == cuts.len() + 1 { f64::INFINITY } else { cuts[k - 1] - eta };
    (lo, hi)
}

/// Log-likelihood at unconstrained parameters. Rows are summed sequentially
/// in input order so results are reproducible bit for bit.
pub fn log_likelihood_at(theta: &[f64], data: &OrdinalData) -> LikelihoodValue {
    let p = data.n_cols();
    let cuts = thresholds(theta, p);
    let beta = &theta[..p];
    let mut value = 0.0;
    let mut floored = 0;
    for (i, &y) in data.response().iter().enumerate() {
        let eta = dot(data.row(i), beta);
        let (lo, hi) = bounds(&cuts, y as usize, eta);
        let prob = normal::interval_prob(lo, hi);
        if prob < PROBABILITY_FLOOR || prob.is_nan() {
            floored += 1;
            value += ln(PROBABILITY_FLOOR);
        } else {
            value += ln(prob);
        }
    }
    LikelihoodValue { value, floored }
}

/// Analytic gradient of [`log_likelihood_at`]. Floored observations are
/// constant in the floored objective and contribute nothing.
pub fn gradient_at(theta: &[f64], data: &OrdinalData) -> Vec<f64> {
    let p = data.n_cols();
    let cuts = thresholds(theta, p);
    let beta = &theta[..p];
    let mut grad = vec![0.0; theta.len()];
    // Derivatives with respect to the natural thresholds c_1..c_{K-1}.
    let mut d_cut = vec![0.0; cuts.len()];
    for (i, &y) in data.response().iter().enumerate() {
        let x = data.row(i);
        let k = y as usize;
        let eta = dot(x, beta);
        let (lo, hi) = bounds(&cuts, k, eta);
        let prob = normal::interval_prob(lo, hi);
        if prob < PROBABILITY_FLOOR || prob.is_nan() {
            continue;
        }
        let dens_lo = if lo.is_finite() { normal::pdf(lo) } else { 0.0 };
        let dens_hi = if hi.is_finite() { normal::pdf(hi) } else { 0.0 };
        let d_eta = (dens_lo - dens_hi) / prob;
        for (g, xj) in grad[..p].iter_mut().zip(x) {
            *g += d_eta * xj;
        }
        if k > 1 {
            d_cut[k - 2] -= dens_lo / prob;
        }
        if k <= cuts.len() {
            d_cut[k - 1] += dens_hi / prob;
        }
    }
    // c_j depends on c_1 with slope 1 and on t_m (m <= j) with slope exp(t_m).
    let mut tail = 0.0;
    for j in (0..cuts.len()).rev() {
        tail += d_cut[j];
        grad[p + j] = if j == 0 { tail } else { tail * exp(theta[p + j]) };
    }
    grad
}
