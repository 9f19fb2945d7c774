//! Gaussian copula with latent correlations adjusted so that the
//! transformed margins carry the target Pearson correlations.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use super::margins::Margin;
use crate::math::sqrt;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CopulaError {
    #[error("correlation matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NonPSDCorrelation { min_eigenvalue: f64 },
    #[error("correlation matrix must be square, symmetric with unit diagonal")]
    InvalidCorrelation,
    #[error("target correlation {target} between columns {i} and {j} is out of reach of the margins")]
    Unreachable { i: usize, j: usize, target: f64 },
}

/// Probabilists' Gauss-Hermite rule: nodes and weights for `E[f(Z)]`,
/// `Z ~ N(0, 1)`, from the eigen-decomposition of the Jacobi matrix.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = sqrt(k as f64);
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)] * eig.eigenvectors[(0, i)])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

const QUADRATURE_NODES: usize = 80;

/// Quadrature tables shared by the correlation searches.
struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    fn new() -> Self {
        let (nodes, weights) = gauss_hermite(QUADRATURE_NODES);
        Quadrature { nodes, weights }
    }

    fn moments(&self, m: &Margin) -> (f64, f64) {
        let mean: f64 = self.nodes.iter().zip(&self.weights).map(|(z, w)| w * m.apply(*z)).sum();
        let var: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| {
                let d = m.apply(*z) - mean;
                w * d * d
            })
            .sum();
        (mean, sqrt(var))
    }

    /// Pearson correlation of `a(Z1)` and `b(Z2)` when `corr(Z1, Z2) = r`.
    fn induced(&self, a: &Margin, b: &Margin, r: f64, ma: (f64, f64), mb: (f64, f64)) -> f64 {
        let q = sqrt(1.0 - r * r);
        let mut cov = 0.0;
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            let fa = a.apply(*x) - ma.0;
            let mut inner = 0.0;
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                inner += wy * (b.apply(r * x + q * y) - mb.0);
            }
            cov += wx * fa * inner;
        }
        cov / (ma.1 * mb.1)
    }
}

fn check_correlation(target: &[f64], k: usize) -> Result<(), CopulaError> {
    if target.len() != k * k {
        return Err(CopulaError::InvalidCorrelation);
    }
    for i in 0..k {
        if target[i * k + i] != 1.0 {
            return Err(CopulaError::InvalidCorrelation);
        }
        for j in 0..i {
            let r = target[i * k + j];
            if r != target[j * k + i] || !(-1.0..=1.0).contains(&r) {
                return Err(CopulaError::InvalidCorrelation);
            }
        }
    }
    Ok(())
}

/// Latent normal correlations reproducing `target` (row-major) after the
/// margins are applied.
pub fn latent_correlation(margins: &[Margin], target: &[f64]) -> Result<Vec<f64>, CopulaError> {
    let k = margins.len();
    check_correlation(target, k)?;
    let quad = Quadrature::new();
    let moments: Vec<(f64, f64)> = margins.iter().map(|m| quad.moments(m)).collect();
    let mut latent = target.to_vec();
    for i in 0..k {
        for j in 0..i {
            let goal = target[i * k + j];
            let f = |r: f64| quad.induced(&margins[i], &margins[j], r, moments[i], moments[j]);
            let limit = 1.0 - 1e-12;
            if goal > f(limit) || goal < f(-limit) {
                return Err(CopulaError::Unreachable { i, j, target: goal });
            }
            let (mut lo, mut hi) = (-limit, limit);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < goal {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            latent[i * k + j] = r;
            latent[j * k + i] = r;
        }
    }
    Ok(latent)
}

pub fn min_eigenvalue(corr: &[f64], k: usize) -> f64 {
    let m = DMatrix::from_row_slice(k, k, corr);
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Eigenvalue clipping at `floor` followed by rescaling to unit diagonal.
pub fn nearest_psd(corr: &[f64], k: usize, floor: f64) -> Vec<f64> {
    let m = DMatrix::from_row_slice(k, k, corr);
    let eig = SymmetricEigen::new(m);
    let clipped = eig.eigenvalues.map(|v| v.max(floor));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let scale: Vec<f64> = (0..k).map(|i| 1.0 / sqrt(rebuilt[(i, i)])).collect();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            out.push(if i == j { 1.0 } else { rebuilt[(i, j)] * scale[i] * scale[j] });
        }
    }
    out
}

pub const PSD_FLOOR: f64 = 1e-10;

/// Lower Cholesky factor of a correlation matrix, repairing it first when
/// it is not positive definite and `repair` is set.
pub fn cholesky_factor(corr: &[f64], k: usize, repair: bool) -> Result<DMatrix<f64>, CopulaError> {
    let m = DMatrix::from_row_slice(k, k, corr);
    if let Some(chol) = m.clone().cholesky() {
        return Ok(chol.l());
    }
    let min_eigenvalue = min_eigenvalue(corr, k);
    if !repair {
        return Err(CopulaError::NonPSDCorrelation { min_eigenvalue });
    }
    log::warn!("correlation matrix repaired: smallest eigenvalue {min_eigenvalue:.3e} clipped to {PSD_FLOOR:e}");
    let fixed = nearest_psd(corr, k, PSD_FLOOR);
    DMatrix::from_row_slice(k, k, &fixed)
        .cholesky()
        .map(|c| c.l())
        .ok_or(CopulaError::NonPSDCorrelation { min_eigenvalue })
}
