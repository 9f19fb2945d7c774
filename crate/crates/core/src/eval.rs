//! Forecast errors `predicted - actual` and their accuracy shares.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("no observations to evaluate")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub delta: Vec<i64>,
    /// Share with `|delta| = 0`.
    pub share_exact: f64,
    pub share_abs1: f64,
    pub share_abs2: f64,
    /// Share with `|delta| <= 1`.
    pub share_within1: f64,
    pub share_within2: f64,
    pub histogram: BTreeMap<i64, usize>,
}

pub fn evaluate(actual: &[u32], predicted: &[u32]) -> Result<EvalReport, EvalError> {
    if actual.len() != predicted.len() {
        return Err(EvalError::LengthMismatch { actual: actual.len(), predicted: predicted.len() });
    }
    if actual.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let delta: Vec<i64> = predicted.iter().zip(actual).map(|(p, a)| *p as i64 - *a as i64).collect();
    Ok(report_from_deltas(delta))
}

pub(crate) fn report_from_deltas(delta: Vec<i64>) -> EvalReport {
    let n = delta.len();
    let mut histogram = BTreeMap::new();
    let mut by_abs = [0usize; 3];
    for &d in &delta {
        *histogram.entry(d).or_insert(0) += 1;
        if let Some(slot) = by_abs.get_mut(d.unsigned_abs() as usize) {
            *slot += 1;
        }
    }
    let share = |c: usize| c as f64 / n as f64;
    EvalReport {
        n,
        delta,
        share_exact: share(by_abs[0]),
        share_abs1: share(by_abs[1]),
        share_abs2: share(by_abs[2]),
        share_within1: share(by_abs[0] + by_abs[1]),
        share_within2: share(by_abs[0] + by_abs[1] + by_abs[2]),
        histogram,
    }
}

/// `delta,count` rows in ascending delta order, LF-terminated.
pub fn histogram_csv(histogram: &BTreeMap<i64, usize>) -> String {
    let mut out = String::from("delta,count\n");
    for (d, c) in histogram {
        out.push_str(&format!("{d},{c}\n"));
    }
    out
}
