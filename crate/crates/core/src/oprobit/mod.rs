//! Ordered probit.
//!
//! A latent index `x·beta + e`, `e ~ N(0, 1)`, is cut by strictly increasing
//! thresholds `c_1 < ... < c_{K-1}` into classes `1..=K`:
//! `P(y = k | x) = Phi(c_k - x·beta) - Phi(c_{k-1} - x·beta)` with
//! `c_0 = -inf` and `c_K = +inf`. Lower codes are better ratings, so a
//! negative coefficient pushes an issuer towards a better rating.
//!
//! The optimizer works on an unconstrained vector
//! `theta = (beta, c_1, t_2, ..., t_{K-1})` with `c_k = c_{k-1} + exp(t_k)`.
//! Binary probit is the `K = 2` case; its single threshold is the negated
//! intercept.

mod fit;
mod likelihood;

use alloc::vec::Vec;

use thiserror::Error;

use crate::math::exp;
use crate::math::ln;
use crate::normal;

pub use fit::{fit, fit_binary_probit, null_thresholds, FitDiagnostics, FitOptions, Significance};
pub use likelihood::{gradient_at, log_likelihood_at, LikelihoodValue, PROBABILITY_FLOOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbitError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {row}: response {code} outside 1..={n_classes}")]
    ResponseOutOfRange { row: usize, code: u32, n_classes: usize },
    #[error("thresholds must be finite and strictly increasing")]
    ThresholdsNotIncreasing,
    #[error("no observations in category {0}")]
    EmptyCategory(u32),
    #[error("{rows} rows cannot identify {needed} parameters plus one")]
    TooFewObservations { rows: usize, needed: usize },
    #[error("not converged after {iterations} iterations (max |gradient| {gradient_norm:.3e})")]
    NotConverged { iterations: usize, gradient_norm: f64 },
    #[error("observed information matrix is singular at the optimum")]
    SingularHessian,
}

/// Regressor matrix (row-major) with ordinal responses in `1..=n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalData {
    x: Vec<f64>,
    n_cols: usize,
    y: Vec<u32>,
    n_classes: usize,
}

impl OrdinalData {
    pub fn new(x: Vec<f64>, n_cols: usize, y: Vec<u32>, n_classes: usize) -> Result<Self, ProbitError> {
        if x.len() != y.len() * n_cols {
            return Err(ProbitError::DimensionMismatch { expected: y.len() * n_cols, found: x.len() });
        }
        if let Some((row, &code)) = y.iter().enumerate().find(|(_, c)| **c == 0 || **c as usize > n_classes) {
            return Err(ProbitError::ResponseOutOfRange { row, code, n_classes });
        }
        Ok(OrdinalData { x, n_cols, y, n_classes })
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn response(&self) -> &[u32] {
        &self.y
    }

    pub fn regressors(&self) -> &[f64] {
        &self.x
    }

    /// Observations per class, index 0 holding class 1.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.n_classes];
        for &c in &self.y {
            counts[c as usize - 1] += 1;
        }
        counts
    }

    /// Rows in order followed by the same rows again.
    pub fn duplicated(&self) -> Self {
        let mut x = self.x.clone();
        x.extend_from_slice(&self.x);
        let mut y = self.y.clone();
        y.extend_from_slice(&self.y);
        OrdinalData { x, n_cols: self.n_cols, y, n_classes: self.n_classes }
    }
}

/// Class probabilities for one observation, index 0 holding class 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities(pub Vec<f64>);

impl ClassProbabilities {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Most likely class; ties go to the lower (better) code.
    pub fn argmax(&self) -> u32 {
        let mut best = 0;
        for (k, p) in self.0.iter().enumerate() {
            if *p > self.0[best] {
                best = k;
            }
        }
        best as u32 + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedProbitModel {
    beta: Vec<f64>,
    thresholds: Vec<f64>,
}

impl OrderedProbitModel {
    pub fn new(beta: Vec<f64>, thresholds: Vec<f64>) -> Result<Self, ProbitError> {
        let increasing = thresholds.windows(2).all(|w| w[0] < w[1]);
        if thresholds.is_empty() || !increasing || thresholds.iter().any(|c| !c.is_finite()) {
            return Err(ProbitError::ThresholdsNotIncreasing);
        }
        Ok(OrderedProbitModel { beta, thresholds })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn n_classes(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn n_params(&self) -> usize {
        self.beta.len() + self.thresholds.len()
    }

    fn check_row(&self, x: &[f64]) -> Result<(), ProbitError> {
        if x.len() != self.beta.len() {
            return Err(ProbitError::DimensionMismatch { expected: self.beta.len(), found: x.len() });
        }
        Ok(())
    }

    pub fn linear_index(&self, x: &[f64]) -> Result<f64, ProbitError> {
        self.check_row(x)?;
        Ok(likelihood::dot(x, &self.beta))
    }

    pub fn class_probabilities(&self, x: &[f64]) -> Result<ClassProbabilities, ProbitError> {
        let eta = self.linear_index(x)?;
        Ok(self.probabilities_at_index(eta))
    }

    /// Class probabilities for a given linear index `x·beta`.
    pub fn probabilities_at_index(&self, eta: f64) -> ClassProbabilities {
        let k = self.n_classes();
        let probs = (0..k)
            .map(|j| {
                let lo = if j == 0 { f64::NEG_INFINITY } else { self.thresholds[j - 1] - eta };
                let hi = if j + 1 == k { f64::INFINITY } else { self.thresholds[j] - eta };
                normal::interval_prob(lo, hi)
            })
            .collect();
        ClassProbabilities(probs)
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<u32, ProbitError> {
        Ok(self.class_probabilities(x)?.argmax())
    }

    fn check_data(&self, data: &OrdinalData) -> Result<(), ProbitError> {
        if data.n_cols() != self.beta.len() {
            return Err(ProbitError::DimensionMismatch { expected: self.beta.len(), found: data.n_cols() });
        }
        if data.n_classes() != self.n_classes() {
            return Err(ProbitError::DimensionMismatch { expected: self.n_classes(), found: data.n_classes() });
        }
        Ok(())
    }

    /// Sum of log class probabilities, each floored at [`PROBABILITY_FLOOR`].
    pub fn log_likelihood(&self, data: &OrdinalData) -> Result<f64, ProbitError> {
        self.check_data(data)?;
        Ok(log_likelihood_at(&self.to_unconstrained(), data).value)
    }

    /// Analytic gradient with respect to the unconstrained parameters.
    pub fn gradient(&self, data: &OrdinalData) -> Result<Vec<f64>, ProbitError> {
        self.check_data(data)?;
        Ok(gradient_at(&self.to_unconstrained(), data))
    }

    /// `(beta, c_1, ln(c_2 - c_1), ..., ln(c_{K-1} - c_{K-2}))`.
    pub fn to_unconstrained(&self) -> Vec<f64> {
        let mut theta = self.beta.clone();
        theta.push(self.thresholds[0]);
        theta.extend(self.thresholds.windows(2).map(|w| ln(w[1] - w[0])));
        theta
    }

    pub fn from_unconstrained(n_cols: usize, theta: &[f64]) -> Result<Self, ProbitError> {
        if theta.len() <= n_cols {
            return Err(ProbitError::DimensionMismatch { expected: n_cols + 1, found: theta.len() });
        }
        let beta = theta[..n_cols].to_vec();
        let mut thresholds = Vec::with_capacity(theta.len() - n_cols);
        let mut c = theta[n_cols];
        thresholds.push(c);
        for t in &theta[n_cols + 1..] {
            c += exp(*t);
            thresholds.push(c);
        }
        OrderedProbitModel::new(beta, thresholds)
    }
}
