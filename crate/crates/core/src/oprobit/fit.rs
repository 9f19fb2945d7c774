//! Maximum-likelihood fitting.
//!
//! Newton iterations use a central finite-difference Hessian of the analytic
//! gradient and a backtracking Armijo line search. When the Hessian is not
//! negative definite, or the Newton direction does not ascend, the step
//! falls back to the normalised gradient.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use super::likelihood::{gradient_at, log_likelihood_at};
use super::{OrderedProbitModel, OrdinalData, ProbitError};
use crate::math::{exp, sqrt};
use crate::normal;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Converged once every gradient component is below this.
    pub gradient_tolerance: f64,
    /// Converged once two successive Newton steps each change lnL by less
    /// than this, relatively.
    pub relative_tolerance: f64,
    pub armijo: f64,
    pub contraction: f64,
    pub max_backtracks: usize,
    /// Relative step of the finite-difference Hessian.
    pub hessian_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            gradient_tolerance: 1e-8,
            relative_tolerance: 1e-10,
            armijo: 1e-4,
            contraction: 0.5,
            max_backtracks: 60,
            hessian_step: 1e-5,
        }
    }
}

/// Two-sided significance level reached by a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Significance {
    None,
    TenPercent,
    FivePercent,
    OnePercent,
}

impl Significance {
    pub fn from_p_value(p: f64) -> Self {
        if p < 0.01 {
            Significance::OnePercent
        } else if p < 0.05 {
            Significance::FivePercent
        } else if p < 0.10 {
            Significance::TenPercent
        } else {
            Significance::None
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Significance::None => "",
            Significance::TenPercent => "*",
            Significance::FivePercent => "**",
            Significance::OnePercent => "***",
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stars())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    pub loglik: f64,
    /// Thresholds-only log-likelihood.
    pub loglik_null: f64,
    /// `1 - loglik / loglik_null`.
    pub pseudo_r2_mcfadden: f64,
    /// Standard errors of `(beta, thresholds)` in natural units.
    pub se: Vec<f64>,
    pub z: Vec<f64>,
    pub stars: Vec<Significance>,
    pub n_obs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub max_abs_gradient: f64,
    /// Observations whose class probability hit the floor at the optimum.
    pub floored_obs: usize,
    pub class_counts: Vec<usize>,
}

/// `Phi^{-1}` of the cumulative empirical class shares: the thresholds-only
/// maximum-likelihood estimate.
pub fn null_thresholds(counts: &[usize]) -> Vec<f64> {
    let n: usize = counts.iter().sum();
    let mut cum = 0;
    counts[..counts.len() - 1]
        .iter()
        .map(|c| {
            cum += c;
            normal::quantile(cum as f64 / n as f64)
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| x.abs().max(m))
}

fn check_fit_inputs(data: &OrdinalData) -> Result<Vec<usize>, ProbitError> {
    let k = data.n_classes();
    if k < 2 {
        return Err(ProbitError::EmptyCategory(2));
    }
    let counts = data.class_counts();
    if let Some(empty) = counts.iter().position(|c| *c == 0) {
        return Err(ProbitError::EmptyCategory(empty as u32 + 1));
    }
    let needed = data.n_cols() + k;
    if data.n_rows() < needed {
        return Err(ProbitError::TooFewObservations { rows: data.n_rows(), needed });
    }
    Ok(counts)
}

/// Central-difference Hessian of the analytic gradient, symmetrised.
fn fd_hessian(theta: &[f64], data: &OrdinalData, rel_step: f64) -> DMatrix<f64> {
    let n = theta.len();
    let mut h = DMatrix::zeros(n, n);
    let mut probe = theta.to_vec();
    for j in 0..n {
        let step = rel_step * theta[j].abs().max(1.0);
        probe[j] = theta[j] + step;
        let up = gradient_at(&probe, data);
        probe[j] = theta[j] - step;
        let down = gradient_at(&probe, data);
        probe[j] = theta[j];
        for i in 0..n {
            h[(i, j)] = (up[i] - down[i]) / (2.0 * step);
        }
    }
    (&h + h.transpose()) * 0.5
}

/// Newton direction `(-H)^{-1} g`, if `-H` is positive definite.
fn newton_direction(hessian: &DMatrix<f64>, grad: &[f64]) -> Option<Vec<f64>> {
    let neg = -hessian.clone();
    let chol = neg.cholesky()?;
    let d = chol.solve(&DVector::from_column_slice(grad));
    d.iter().all(|v| v.is_finite()).then(|| d.iter().copied().collect())
}

/// Fit an ordered probit by maximum likelihood.
///
/// Starts from `beta = 0` and the thresholds-only estimate, which is also
/// the null model, so `loglik >= loglik_null` holds by construction.
pub fn fit(data: &OrdinalData, options: &FitOptions) -> Result<(OrderedProbitModel, FitDiagnostics), ProbitError> {
    let counts = check_fit_inputs(data)?;
    let p = data.n_cols();
    let null = OrderedProbitModel::new(vec![0.0; p], null_thresholds(&counts))?;
    let mut theta = null.to_unconstrained();
    let loglik_null = log_likelihood_at(&theta, data).value;

    let mut ll = loglik_null;
    let mut grad = gradient_at(&theta, data);
    let mut iterations = 0;
    let mut converged = false;
    let mut quiet_steps = 0;

    while iterations < options.max_iterations {
        if max_abs(&grad) < options.gradient_tolerance {
            converged = true;
            break;
        }
        let hessian = fd_hessian(&theta, data, options.hessian_step);
        let newton = newton_direction(&hessian, &grad).filter(|d| dot(d, &grad) > 0.0);
        let is_newton = newton.is_some();
        let direction = newton.unwrap_or_else(|| {
            let norm = sqrt(dot(&grad, &grad));
            grad.iter().map(|g| g / norm).collect()
        });
        let slope = dot(&direction, &grad);

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..options.max_backtracks {
            let candidate: Vec<f64> = theta.iter().zip(&direction).map(|(t, d)| t + step * d).collect();
            let value = log_likelihood_at(&candidate, data).value;
            if value.is_finite() && value >= ll + options.armijo * step * slope {
                accepted = Some((candidate, value));
                break;
            }
            step *= options.contraction;
        }
        iterations += 1;
        let Some((next, value)) = accepted else {
            break;
        };
        let change = (value - ll).abs() / ll.abs().max(f64::MIN_POSITIVE);
        theta = next;
        ll = value;
        grad = gradient_at(&theta, data);
        log::debug!(
            "iteration {iterations}: lnL {ll:.12e}, step {step}, newton {is_newton}, max |g| {:.3e}",
            max_abs(&grad)
        );
        // One quiet Newton step can still leave sizeable gradient components
        // along badly scaled columns; a second one polishes them.
        quiet_steps = if is_newton && change < options.relative_tolerance { quiet_steps + 1 } else { 0 };
        if quiet_steps == 2 {
            converged = true;
            break;
        }
    }

    let gradient_norm = max_abs(&grad);
    if !converged || separated(&theta, data) {
        return Err(ProbitError::NotConverged { iterations, gradient_norm });
    }

    let model = OrderedProbitModel::from_unconstrained(p, &theta)?;
    let hessian = fd_hessian(&theta, data, options.hessian_step);
    let se = natural_standard_errors(&hessian, &theta, p)?;
    let params: Vec<f64> = model.beta().iter().chain(model.thresholds()).copied().collect();
    let z: Vec<f64> = params.iter().zip(&se).map(|(b, s)| b / s).collect();
    let stars = z.iter().map(|z| Significance::from_p_value(2.0 * normal::sf(z.abs()))).collect();
    let floored_obs = log_likelihood_at(&theta, data).floored;
    let pseudo_r2_mcfadden = 1.0 - ll / loglik_null;

    let diagnostics = FitDiagnostics {
        loglik: ll,
        loglik_null,
        pseudo_r2_mcfadden,
        se,
        z,
        stars,
        n_obs: data.n_rows(),
        iterations,
        converged,
        max_abs_gradient: gradient_norm,
        floored_obs,
        class_counts: counts,
    };
    Ok((model, diagnostics))
}

/// Binary probit: [`fit`] restricted to two classes.
pub fn fit_binary_probit(
    data: &OrdinalData,
    options: &FitOptions,
) -> Result<(OrderedProbitModel, FitDiagnostics), ProbitError> {
    if data.n_classes() != 2 {
        return Err(ProbitError::DimensionMismatch { expected: 2, found: data.n_classes() });
    }
    fit(data, options)
}

/// Every observation sits in its class with probability indistinguishable
/// from one: the likelihood has no interior maximum.
fn separated(theta: &[f64], data: &OrdinalData) -> bool {
    if data.n_cols() == 0 {
        return false;
    }
    let Ok(model) = OrderedProbitModel::from_unconstrained(data.n_cols(), theta) else {
        return true;
    };
    data.response().iter().enumerate().all(|(i, &y)| {
        let probs = model.probabilities_at_index(super::likelihood::dot(data.row(i), model.beta()));
        probs.0[y as usize - 1] > 1.0 - 1e-6
    })
}

/// Delta-method standard errors of `(beta, thresholds)` from the inverse
/// observed information in the unconstrained parameterisation.
fn natural_standard_errors(hessian: &DMatrix<f64>, theta: &[f64], p: usize) -> Result<Vec<f64>, ProbitError> {
    let n = theta.len();
    let info = -hessian.clone();
    let chol = info.cholesky().ok_or(ProbitError::SingularHessian)?;
    let cov = chol.inverse();
    // Jacobian of (beta, c) with respect to theta.
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..p {
        jac[(i, i)] = 1.0;
    }
    for j in p..n {
        jac[(j, p)] = 1.0;
        for m in p + 1..=j {
            jac[(j, m)] = exp(theta[m]);
        }
    }
    let natural = &jac * cov * jac.transpose();
    let se: Vec<f64> = (0..n).map(|i| sqrt(natural[(i, i)])).collect();
    if se.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(ProbitError::SingularHessian);
    }
    Ok(se)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
