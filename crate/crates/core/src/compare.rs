//! Two-agency rating comparison: differences, absolute differences and the
//! split indicator, plus ordered/binary probit models of each.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::data::Observation;
use crate::eval::EvalError;
use crate::model_spec::ModelSpec;
use crate::oprobit::{fit, FitDiagnostics, FitOptions, OrderedProbitModel, OrdinalData, ProbitError};
use crate::scales::{encode, ScaleKind};

#[derive(Debug, Clone, PartialEq)]
pub struct PairedRating {
    pub company_id: String,
    /// Input index of the observation.
    pub index: usize,
    pub sp_code: u32,
    pub moodys_code: u32,
    /// Regressors for the comparison spec, `None` when incomplete.
    pub regressors: Option<Vec<f64>>,
}

/// Which agency's code is subtracted from which.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DeltaSign {
    #[default]
    SpMinusMoodys,
    MoodysMinusSp,
}

impl DeltaSign {
    pub fn name(self) -> &'static str {
        match self {
            DeltaSign::SpMinusMoodys => "sp-minus-moodys",
            DeltaSign::MoodysMinusSp => "moodys-minus-sp",
        }
    }
}

impl fmt::Display for DeltaSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeltaSign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sp-minus-moodys" => Ok(DeltaSign::SpMinusMoodys),
            "moodys-minus-sp" => Ok(DeltaSign::MoodysMinusSp),
            other => Err(alloc::format!("unknown delta sign {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonMeasures {
    pub delta: i64,
    pub fds: u32,
    pub split: u8,
}

/// Observations rated by both agencies, encoded on `scale`.
pub fn pair(dataset: &[Observation], scale: ScaleKind, spec: &ModelSpec) -> Vec<PairedRating> {
    dataset
        .iter()
        .enumerate()
        .filter_map(|(index, obs)| {
            let sp = obs.sp_rating?;
            let moodys = obs.moodys_rating?;
            Some(PairedRating {
                company_id: obs.company_id.clone(),
                index,
                sp_code: encode(sp, scale),
                moodys_code: encode(moodys, scale),
                regressors: spec.row(obs).ok(),
            })
        })
        .collect()
}

pub fn measures_from_codes(sp_code: u32, moodys_code: u32, sign: DeltaSign) -> ComparisonMeasures {
    let d = sp_code as i64 - moodys_code as i64;
    let delta = match sign {
        DeltaSign::SpMinusMoodys => d,
        DeltaSign::MoodysMinusSp => -d,
    };
    ComparisonMeasures { delta, fds: delta.unsigned_abs() as u32, split: (delta != 0) as u8 }
}

/// With the default sign a negative delta means S&P gave the better code.
pub fn compute_measures(pair: &PairedRating, sign: DeltaSign) -> ComparisonMeasures {
    measures_from_codes(pair.sp_code, pair.moodys_code, sign)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub n: usize,
    pub mean_delta: f64,
    pub histogram: BTreeMap<i64, usize>,
}

pub fn summarize(measures: &[ComparisonMeasures]) -> Result<ComparisonSummary, EvalError> {
    if measures.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut histogram = BTreeMap::new();
    let mut total = 0i64;
    for m in measures {
        *histogram.entry(m.delta).or_insert(0) += 1;
        total += m.delta;
    }
    Ok(ComparisonSummary { n: measures.len(), mean_delta: total as f64 / measures.len() as f64, histogram })
}

pub type FittedModel = (OrderedProbitModel, FitDiagnostics);

#[derive(Debug, Clone, PartialEq)]
pub struct DisagreementFits {
    /// Pairs with complete regressors.
    pub n_used: usize,
    /// Smallest observed delta; delta category `k` is `min_delta + k - 1`.
    pub min_delta: i64,
    pub delta: Result<FittedModel, ProbitError>,
    /// Category `k` is `|delta| = k - 1`.
    pub fds: Result<FittedModel, ProbitError>,
    /// Category 1 is agreement, 2 a split.
    pub split: Result<FittedModel, ProbitError>,
}

/// Ordered probit for delta and FDS, binary probit for SPLIT, all on the
/// pairs whose regressors are complete.
pub fn fit_disagreement_models(
    pairs: &[PairedRating],
    n_cols: usize,
    sign: DeltaSign,
    options: &FitOptions,
) -> DisagreementFits {
    let used: Vec<(&[f64], ComparisonMeasures)> =
        pairs.iter().filter_map(|p| Some((p.regressors.as_deref()?, compute_measures(p, sign)))).collect();
    let mut x = Vec::with_capacity(used.len() * n_cols);
    for (row, _) in &used {
        x.extend_from_slice(row);
    }
    let min_delta = used.iter().map(|(_, m)| m.delta).min().unwrap_or(0);
    let max_delta = used.iter().map(|(_, m)| m.delta).max().unwrap_or(0);
    let max_fds = used.iter().map(|(_, m)| m.fds).max().unwrap_or(0);

    let run = |y: Vec<u32>, k: usize| OrdinalData::new(x.clone(), n_cols, y, k).and_then(|d| fit(&d, options));
    let delta =
        run(used.iter().map(|(_, m)| (m.delta - min_delta + 1) as u32).collect(), (max_delta - min_delta + 1) as usize);
    let fds = run(used.iter().map(|(_, m)| m.fds + 1).collect(), max_fds as usize + 1);
    let split = run(used.iter().map(|(_, m)| m.split as u32 + 1).collect(), 2);
    DisagreementFits { n_used: used.len(), min_delta, delta, fds, split }
}
