//! Synthetic issuer data calibrated to reference summary statistics, and
//! the simulation oracles used by tests.
//!
//! The eight summary indicators come from a Gaussian copula. Each margin is
//! a shifted lognormal clipped at the reference maximum (log capitalization
//! is a clipped normal instead), calibrated so its exact mean and sd match
//! the targets, and the latent correlations are solved pairwise so the
//! transformed columns carry the target Pearson correlations. Raw accounts
//! are then reconstructed so every derived indicator reproduces the drawn
//! value. Everything else (other indicators, macro variables, dummies)
//! follows the documented defaults of [`GeneratorConfig`], which are not
//! taken from any publication.
//!
//! All draws come from ChaCha8 streams keyed by the seed: stream 0 for
//! covariates, 1 for rating noise, 2 for split noise and 3 for the size and
//! direction of splits.

mod copula;
mod fixture;
mod margins;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal, StandardUniform};
use thiserror::Error;

use crate::data::{Date, Industry, Observation, RawField};
use crate::math::{exp, powi10};
use crate::model_spec::{preset, MissingValue, ModelSpec, Regressor};
use crate::oprobit::{log_likelihood_at, OrderedProbitModel, OrdinalData, ProbitError};
use crate::scales::{encode, Agency, RatingGrade, ScaleKind};

pub use copula::{
    cholesky_factor, gauss_hermite, latent_correlation, min_eigenvalue, nearest_psd, CopulaError, PSD_FLOOR,
};
pub use fixture::{
    notch_thresholds, BASE_SP_BETA, CC_NOTCH_WIDTH, CLASS_THRESHOLDS, SPLIT_BETA, SPLIT_THRESHOLD, SUMMARY_CORRELATION,
    SUMMARY_MAX, SUMMARY_MEAN, SUMMARY_MEDIAN, SUMMARY_MIN, SUMMARY_SD,
};
pub use margins::{calibrate, Margin, MarginFamily, MarginTarget, MarginUnattainable};

/// Mean and sd of a normal draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    pub mean: f64,
    pub sd: f64,
}

const fn np(mean: f64, sd: f64) -> NormalParams {
    NormalParams { mean, sd }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroDistribution {
    pub inflation: NormalParams,
    pub gdp_growth: NormalParams,
    pub cpi_corruption: NormalParams,
    /// Sovereign S&P grades, drawn uniformly.
    pub sovereign: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMacros {
    pub developed: MacroDistribution,
    pub developing: MacroDistribution,
    pub russia: MacroDistribution,
}

/// Ordered probit over the 21 notches AAA..C for the first agency.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingDgp {
    pub spec: ModelSpec,
    pub beta: Vec<f64>,
    pub notch_thresholds: Vec<f64>,
}

impl RatingDgp {
    /// The class-scale model implied by the notch model.
    pub fn classes8_model(&self) -> OrderedProbitModel {
        let cuts = class_cuts(&self.notch_thresholds);
        OrderedProbitModel::new(self.beta.clone(), cuts).expect("fixture thresholds increase")
    }
}

fn class_cuts(notch_cuts: &[f64]) -> Vec<f64> {
    // Last notch of classes AAA..CCC: AAA, AA-, A-, BBB-, BB-, B-, CCC-.
    [1usize, 4, 7, 10, 13, 16, 19].iter().map(|n| notch_cuts[n - 1]).collect()
}

/// Binary probit deciding whether the second agency's 18-gradation code
/// differs from the first agency's, and how the shift is drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDgp {
    pub spec: ModelSpec,
    pub beta: Vec<f64>,
    pub threshold: f64,
    /// Probability a split is two gradations rather than one.
    pub two_step_share: f64,
    /// Probability the first agency (S&P) gives the worse code in a split.
    pub sp_worse_share: f64,
}

impl SplitDgp {
    pub fn model(&self) -> OrderedProbitModel {
        OrderedProbitModel::new(self.beta.clone(), vec![self.threshold]).expect("single threshold")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    pub as_of: Date,
    /// Summary-indicator margins in [`crate::stats::SUMMARY_INDICATORS`] order.
    pub margins: Vec<MarginTarget>,
    /// Row-major target correlations of the summary indicators.
    pub correlation: Vec<f64>,
    /// Repair a non-positive-definite correlation matrix instead of failing.
    pub repair_psd: bool,
    pub developed_share: f64,
    pub russia_share_of_developing: f64,
    /// Weights in [`Industry::ALL`] order.
    pub industry_weights: [f64; 6],
    pub macros: RegionMacros,
    pub ratings: RatingDgp,
    pub split: SplitDgp,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let margins = (0..8)
            .map(|i| MarginTarget {
                mean: SUMMARY_MEAN[i],
                sd: SUMMARY_SD[i],
                min: SUMMARY_MIN[i],
                max: SUMMARY_MAX[i],
                family: if i == CAP { MarginFamily::ClippedNormal } else { MarginFamily::ShiftedLognormal },
            })
            .collect();
        let correlation = SUMMARY_CORRELATION.iter().flatten().copied().collect();
        GeneratorConfig {
            n: 5000,
            seed: 0,
            as_of: Date::new(2009, 12, 31).expect("valid date"),
            margins,
            correlation,
            repair_psd: true,
            // 152 of 215 sample companies were from developed countries.
            developed_share: 152.0 / 215.0,
            russia_share_of_developing: 0.49,
            industry_weights: [0.15, 0.17, 0.15, 0.15, 0.16, 0.22],
            macros: RegionMacros {
                developed: MacroDistribution {
                    inflation: np(2.5, 0.8),
                    gdp_growth: np(2.3, 0.8),
                    cpi_corruption: np(7.6, 1.0),
                    sovereign: vec!["AAA", "AA+", "AA"],
                },
                developing: MacroDistribution {
                    inflation: np(6.5, 2.5),
                    gdp_growth: np(6.0, 1.8),
                    cpi_corruption: np(3.8, 1.0),
                    sovereign: vec!["A-", "BBB+", "BBB", "BBB-", "BB+", "BB"],
                },
                russia: MacroDistribution {
                    inflation: np(9.0, 0.3),
                    gdp_growth: np(8.1, 0.3),
                    cpi_corruption: np(2.3, 0.1),
                    sovereign: vec!["BBB"],
                },
            },
            ratings: RatingDgp {
                spec: preset("base_sp").expect("preset"),
                beta: BASE_SP_BETA.to_vec(),
                notch_thresholds: notch_thresholds(&CLASS_THRESHOLDS),
            },
            split: SplitDgp {
                spec: preset("split_1s").expect("preset"),
                beta: SPLIT_BETA.to_vec(),
                threshold: SPLIT_THRESHOLD,
                two_step_share: 0.3,
                sp_worse_share: 0.7,
            },
        }
    }
}

const CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Margin(#[from] MarginUnattainable),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error("configuration: {0}")]
    Config(alloc::string::String),
    #[error("generated row lacks {0}: {1}")]
    Regressor(Regressor, MissingValue),
    #[error(transparent)]
    Probit(#[from] ProbitError),
}

/// Calibrated margins and the Cholesky factor of the latent correlations.
#[derive(Debug, Clone)]
pub struct CopulaPlan {
    pub margins: Vec<Margin>,
    pub latent_correlation: Vec<f64>,
    factor: DMatrix<f64>,
}

impl CopulaPlan {
    pub fn new(config: &GeneratorConfig) -> Result<Self, SynthError> {
        let k = config.margins.len();
        if config.correlation.len() != k * k {
            return Err(SynthError::Config(format!("correlation must be {k}x{k}")));
        }
        // The target itself must be a valid correlation matrix.
        let target = if cholesky_factor(&config.correlation, k, false).is_ok() {
            config.correlation.clone()
        } else if config.repair_psd {
            log::warn!("target correlation matrix is not positive definite; using its nearest repair");
            nearest_psd(&config.correlation, k, PSD_FLOOR)
        } else {
            return Err(
                CopulaError::NonPSDCorrelation { min_eigenvalue: min_eigenvalue(&config.correlation, k) }.into()
            );
        };
        let margins = config.margins.iter().map(calibrate).collect::<Result<Vec<_>, _>>()?;
        let latent = latent_correlation(&margins, &target)?;
        let factor = cholesky_factor(&latent, k, config.repair_psd)?;
        Ok(CopulaPlan { margins, latent_correlation: latent, factor })
    }

    /// One draw of the summary indicators.
    pub fn sample<R: RngCore>(&self, rng: &mut R) -> Vec<f64> {
        let k = self.margins.len();
        let e: Vec<f64> = (0..k).map(|_| std_normal(rng)).collect();
        (0..k)
            .map(|i| {
                let z: f64 = (0..=i).map(|j| self.factor[(i, j)] * e[j]).sum();
                self.margins[i].apply(z)
            })
            .collect()
    }
}

fn std_normal<R: RngCore>(rng: &mut R) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    <StandardUniform as Distribution<f64>>::sample(&StandardUniform, rng)
}

fn normal<R: RngCore>(rng: &mut R, p: NormalParams) -> f64 {
    p.mean + p.sd * std_normal(rng)
}

fn pick<R: RngCore>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = uniform(rng) * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Raw accounts that reproduce the drawn summary indicators exactly.
fn reconstruct<R: RngCore>(obs: &mut Observation, s: &[f64], rng: &mut R) {
    let (roa, ebitda_int, debt_ebitda, cf_sales, op_margin, liquidity, log_cap, ltd_cap) =
        (s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7]);
    let mkt_cap = powi10(log_cap);
    let assets = 1.2 * mkt_cap * exp(0.4 * std_normal(rng));
    let receipts = assets * 0.8 * exp(0.3 * std_normal(rng));
    // Gross earnings stay positive: the operating-margin floor is above -8%.
    let ebitda = receipts * (op_margin + 8.0) / 100.0;
    let total_capital = 0.6 * assets;
    let st_liabilities = 0.25 * assets;
    let fixed_share = (0.45 + 0.2 * std_normal(rng)).clamp(0.02, 0.95);
    let net_earnings = roa / 100.0 * assets;
    let price = 40.0 * exp(0.5 * std_normal(rng));
    let f = &mut obs.financials;
    f.set(RawField::MktCapMusd, Some(mkt_cap));
    f.set(RawField::TotalAssets, Some(assets));
    f.set(RawField::AvgAssets, Some(assets));
    f.set(RawField::NetEarnings, Some(net_earnings));
    f.set(RawField::Receipts, Some(receipts));
    f.set(RawField::OperatingRevenue, Some(op_margin / 100.0 * receipts));
    f.set(RawField::CashFlow, Some(cf_sales / 100.0 * receipts));
    f.set(RawField::Ebitda, Some(ebitda));
    f.set(RawField::Debt, Some(debt_ebitda * ebitda));
    f.set(RawField::InterestExpense, Some(ebitda / ebitda_int));
    f.set(RawField::TotalCapital, Some(total_capital));
    f.set(RawField::LtDebt, Some(ltd_cap / 100.0 * total_capital));
    f.set(RawField::StLiabilities, Some(st_liabilities));
    f.set(RawField::StAssets, Some(liquidity * st_liabilities));
    f.set(RawField::FixedAssets, Some(fixed_share * assets));
    f.set(RawField::Price, Some(price));
    f.set(RawField::Eps, Some(price * net_earnings / mkt_cap));
    obs.beta = Some((1.0 + 0.35 * std_normal(rng)).clamp(0.1, 2.5));
    // Annual volatility in percent: 8 + lognormal with mean 22 and sd 12.
    obs.volatility = Some(8.0 + exp(2.961 + 0.5104 * std_normal(rng)));
}

fn draw_macros<R: RngCore>(obs: &mut Observation, dist: &MacroDistribution, rng: &mut R) {
    obs.macros.inflation = Some(normal(rng, dist.inflation));
    obs.macros.gdp_growth = Some(normal(rng, dist.gdp_growth));
    obs.macros.cpi_corruption = Some(normal(rng, dist.cpi_corruption).clamp(0.0, 10.0));
    let grade = dist.sovereign[(uniform(rng) * dist.sovereign.len() as f64) as usize % dist.sovereign.len()];
    obs.macros.sovereign_rating = Some(RatingGrade::parse(Agency::SP, grade).expect("sovereign grades are canonical"));
}

fn check_config(config: &GeneratorConfig) -> Result<(), SynthError> {
    if config.n == 0 {
        return Err(SynthError::Config("n must be at least 1".into()));
    }
    if config.margins.len() != 8 {
        return Err(SynthError::Config("expected 8 summary-indicator margins".into()));
    }
    let shares = [
        config.developed_share,
        config.russia_share_of_developing,
        config.split.two_step_share,
        config.split.sp_worse_share,
    ];
    if shares.iter().any(|p| !(0.0..=1.0).contains(p)) || config.industry_weights.iter().any(|w| *w < 0.0) {
        return Err(SynthError::Config("shares must be probabilities and weights non-negative".into()));
    }
    for m in [&config.macros.developed, &config.macros.developing, &config.macros.russia] {
        if m.sovereign.is_empty() {
            return Err(SynthError::Config("each region needs at least one sovereign grade".into()));
        }
    }
    Ok(())
}

/// Unrated observations with all raw fields, market measures, macro
/// variables and dummies filled.
pub fn generate_covariates(config: &GeneratorConfig) -> Result<Vec<Observation>, SynthError> {
    check_config(config)?;
    let plan = CopulaPlan::new(config)?;
    Ok(covariates_from_plan(config, &plan))
}

pub fn covariates_from_plan(config: &GeneratorConfig, plan: &CopulaPlan) -> Vec<Observation> {
    let mut rng = stream(config.seed, 0);
    (0..config.n)
        .map(|i| {
            let industry = Industry::ALL[pick(&mut rng, &config.industry_weights)];
            let mut obs = Observation::new(format!("SYN{:06}", i + 1), config.as_of, industry);
            let summary = plan.sample(&mut rng);
            reconstruct(&mut obs, &summary, &mut rng);
            obs.developed = uniform(&mut rng) < config.developed_share;
            obs.russia = !obs.developed && uniform(&mut rng) < config.russia_share_of_developing;
            let region = match (obs.developed, obs.russia) {
                (true, _) => &config.macros.developed,
                (false, true) => &config.macros.russia,
                (false, false) => &config.macros.developing,
            };
            draw_macros(&mut obs, region, &mut rng);
            obs
        })
        .collect()
}

/// Responses of an ordered probit at the given regressor rows:
/// `y = k` where `c_{k-1} < x·beta + e <= c_k`.
pub fn generate_ratings(
    x: &[f64],
    n_cols: usize,
    model: &OrderedProbitModel,
    seed: u64,
) -> Result<Vec<u32>, ProbitError> {
    if n_cols != model.beta().len() || (n_cols > 0 && !x.len().is_multiple_of(n_cols)) {
        return Err(ProbitError::DimensionMismatch { expected: model.beta().len(), found: n_cols });
    }
    Ok(draw_classes(x, n_cols, model, &mut stream(seed, 1)))
}

fn draw_classes<R: RngCore>(x: &[f64], n_cols: usize, model: &OrderedProbitModel, rng: &mut R) -> Vec<u32> {
    let n = x.len().checked_div(n_cols).unwrap_or(0);
    (0..n).map(|i| latent_class(model, &x[i * n_cols..(i + 1) * n_cols], std_normal(rng))).collect()
}

fn latent_class(model: &OrderedProbitModel, row: &[f64], noise: f64) -> u32 {
    let eta: f64 = row.iter().zip(model.beta()).map(|(a, b)| a * b).sum();
    let latent = eta + noise;
    model.thresholds().iter().take_while(|c| latent > **c).count() as u32 + 1
}

fn spec_rows(dataset: &[Observation], spec: &ModelSpec) -> Result<Vec<f64>, SynthError> {
    let mut x = Vec::with_capacity(dataset.len() * spec.len());
    for obs in dataset {
        x.extend(spec.row(obs).map_err(|(r, e)| SynthError::Regressor(r, e))?);
    }
    Ok(x)
}

/// Move an 18-gradation code by `step`, reflecting off the ends of the scale.
fn shifted_code(code: u32, step: i64) -> u32 {
    let moved = code as i64 + step;
    let reflected = if !(1..=18).contains(&moved) { code as i64 - step } else { moved };
    reflected.clamp(1, 18) as u32
}

/// Best Moody's grade inside an 18-gradation bucket.
fn moodys_for_code(code: u32) -> RatingGrade {
    crate::scales::representative_grade(code, ScaleKind::Gradations18).expect("code in range").to_moodys()
}

/// A full rated panel: covariates, S&P grades from the notch model, and
/// Moody's grades that split from S&P per the disagreement model.
pub fn generate_dataset(config: &GeneratorConfig) -> Result<Vec<Observation>, SynthError> {
    let mut data = generate_covariates(config)?;
    rate_dataset(config, &mut data)?;
    Ok(data)
}

/// Assign both agencies' ratings to generated covariates.
pub fn rate_dataset(config: &GeneratorConfig, data: &mut [Observation]) -> Result<(), SynthError> {
    let notch_model = OrderedProbitModel::new(config.ratings.beta.clone(), config.ratings.notch_thresholds.clone())?;
    if notch_model.n_classes() != 21 || notch_model.beta().len() != config.ratings.spec.len() {
        return Err(SynthError::Config(
            "the rating model needs one coefficient per regressor and 20 notch thresholds".into(),
        ));
    }
    let x = spec_rows(data, &config.ratings.spec)?;
    let notches = draw_classes(&x, config.ratings.spec.len(), &notch_model, &mut stream(config.seed, 1));

    let split_model = config.split.model();
    let xs = spec_rows(data, &config.split.spec)?;
    if split_model.beta().len() != config.split.spec.len() {
        return Err(ProbitError::DimensionMismatch {
            expected: config.split.spec.len(),
            found: split_model.beta().len(),
        }
        .into());
    }
    let splits = draw_classes(&xs, config.split.spec.len(), &split_model, &mut stream(config.seed, 2));
    let mut rng = stream(config.seed, 3);
    for ((obs, notch), split) in data.iter_mut().zip(notches).zip(splits) {
        let sp = RatingGrade::from_notch(Agency::SP, notch as usize - 1).expect("notch within the ladder");
        obs.sp_rating = Some(sp);
        let size = if uniform(&mut rng) < config.split.two_step_share { 2 } else { 1 };
        let sp_worse = uniform(&mut rng) < config.split.sp_worse_share;
        obs.moodys_rating = Some(if split == 1 {
            sp.to_moodys()
        } else {
            let code = encode(sp, ScaleKind::Gradations18);
            moodys_for_code(shifted_code(code, if sp_worse { -size } else { size }))
        });
    }
    Ok(())
}

/// Class counts of `draws` latent simulations at one row.
pub fn mc_class_counts(
    model: &OrderedProbitModel,
    x: &[f64],
    draws: usize,
    seed: u64,
) -> Result<Vec<usize>, ProbitError> {
    if x.len() != model.beta().len() {
        return Err(ProbitError::DimensionMismatch { expected: model.beta().len(), found: x.len() });
    }
    let mut counts = vec![0usize; model.n_classes()];
    let mut rng = stream(seed, 4);
    for _ in 0..draws {
        counts[latent_class(model, x, std_normal(&mut rng)) as usize - 1] += 1;
    }
    Ok(counts)
}

/// Empirical class frequencies of `draws` latent simulations at one row.
pub fn mc_class_frequencies(
    model: &OrderedProbitModel,
    x: &[f64],
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>, ProbitError> {
    let counts = mc_class_counts(model, x, draws, seed)?;
    Ok(counts.iter().map(|c| *c as f64 / draws as f64).collect())
}

/// Central finite differences of the log-likelihood in the unconstrained
/// parameterisation.
pub fn fd_gradient(model: &OrderedProbitModel, data: &OrdinalData, h: f64) -> Result<Vec<f64>, ProbitError> {
    model.log_likelihood(data)?;
    let theta = model.to_unconstrained();
    let mut probe = theta.clone();
    Ok((0..theta.len())
        .map(|j| {
            probe[j] = theta[j] + h;
            let up = log_likelihood_at(&probe, data).value;
            probe[j] = theta[j] - h;
            let down = log_likelihood_at(&probe, data).value;
            probe[j] = theta[j];
            (up - down) / (2.0 * h)
        })
        .collect())
}
