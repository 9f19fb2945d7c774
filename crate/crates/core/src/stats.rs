//! Descriptive statistics and pairwise-complete correlations.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::data::{derive_indicator, Indicator, Observation};
use crate::math::{log10, ordered_sum, sqrt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("column {0} has fewer than 2 complete values")]
    InsufficientData(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub name: String,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    pub min: f64,
    /// n-1 normalisation.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub columns: Vec<ColumnStats>,
    /// Row-major `k x k`. Pairs with fewer than two common rows, or with a
    /// constant column on the common rows, hold NaN.
    pub correlation: Vec<f64>,
}

impl SummaryStats {
    pub fn corr(&self, i: usize, j: usize) -> f64 {
        self.correlation[i * self.columns.len() + j]
    }
}

/// A named column with missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

fn column_stats(col: &Column) -> Result<ColumnStats, StatsError> {
    let mut xs: Vec<f64> = col.values.iter().flatten().copied().collect();
    if xs.len() < 2 {
        return Err(StatsError::InsufficientData(col.name.clone()));
    }
    let n = xs.len();
    let mean = ordered_sum(xs.iter().copied()) / n as f64;
    let var = ordered_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64;
    xs.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) };
    Ok(ColumnStats { name: col.name.clone(), n, mean, median, max: xs[n - 1], min: xs[0], sd: sqrt(var) })
}

fn pairwise_corr(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    let pairs: Vec<(f64, f64)> = a.iter().zip(b).filter_map(|(x, y)| Some(((*x)?, (*y)?))).collect();
    if pairs.len() < 2 {
        return f64::NAN;
    }
    let n = pairs.len() as f64;
    let ma = ordered_sum(pairs.iter().map(|p| p.0)) / n;
    let mb = ordered_sum(pairs.iter().map(|p| p.1)) / n;
    let sab = ordered_sum(pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)));
    let saa = ordered_sum(pairs.iter().map(|p| (p.0 - ma) * (p.0 - ma)));
    let sbb = ordered_sum(pairs.iter().map(|p| (p.1 - mb) * (p.1 - mb)));
    if saa <= 0.0 || sbb <= 0.0 {
        return f64::NAN;
    }
    (sab / sqrt(saa * sbb)).clamp(-1.0, 1.0)
}

pub fn descriptive_stats(columns: &[Column]) -> Result<SummaryStats, StatsError> {
    let stats = columns.iter().map(column_stats).collect::<Result<Vec<_>, _>>()?;
    let k = columns.len();
    let mut correlation = vec![0.0; k * k];
    for i in 0..k {
        correlation[i * k + i] = 1.0;
        for j in i + 1..k {
            let r = pairwise_corr(&columns[i].values, &columns[j].values);
            correlation[i * k + j] = r;
            correlation[j * k + i] = r;
        }
    }
    Ok(SummaryStats { columns: stats, correlation })
}

/// The eight columns of the industrial-enterprise summary table, in its
/// order. Capitalization appears as log10 of mln USD.
pub const SUMMARY_INDICATORS: [Indicator; 8] = [
    Indicator::Roa,
    Indicator::EbitdaInterest,
    Indicator::DebtEbitda,
    Indicator::CashFlowSales,
    Indicator::OperatingMargin,
    Indicator::Liquidity,
    Indicator::MarketCap,
    Indicator::LtDebtCapital,
];

/// Indicator values per observation, with capitalization in log10 units;
/// observations whose indicator cannot be formed contribute a missing cell.
pub fn indicator_column(dataset: &[Observation], indicator: Indicator) -> Column {
    let values = dataset
        .iter()
        .map(|obs| {
            let v = derive_indicator(obs, indicator).ok()?;
            match indicator {
                Indicator::MarketCap if v > 0.0 => Some(log10(v)),
                Indicator::MarketCap => None,
                _ => Some(v),
            }
        })
        .collect();
    let name = match indicator {
        Indicator::MarketCap => String::from("log10_mkt_cap"),
        other => String::from(other.name()),
    };
    Column { name, values }
}
