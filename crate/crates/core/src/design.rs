//! Regressor matrices with listwise deletion.

use alloc::vec::Vec;

use thiserror::Error;

use crate::data::Observation;
use crate::model_spec::{MissingValue, ModelSpec, Regressor};
use crate::oprobit::{OrdinalData, ProbitError};
use crate::scales::{encode, Agency, ScaleKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeletionReason {
    MissingRating(Agency),
    MissingRegressor(Regressor, MissingValue),
}

/// Rows dropped while building a design, by input index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeletionReport {
    pub deleted: Vec<(usize, DeletionReason)>,
}

impl DeletionReport {
    pub fn len(&self) -> usize {
        self.deleted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deleted.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("no complete rows remain after listwise deletion ({deleted} deleted)")]
    EmptyAfterDeletion { deleted: usize },
    #[error(transparent)]
    Probit(#[from] ProbitError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub data: OrdinalData,
    pub columns: Vec<Regressor>,
    pub scale: ScaleKind,
    pub agency: Agency,
    /// Input index of each retained row.
    pub rows: Vec<usize>,
}

/// Regressor rows for every observation with a complete spec, and the
/// deletions. No rating is required.
pub fn regressor_rows(dataset: &[Observation], spec: &ModelSpec) -> (Vec<(usize, Vec<f64>)>, DeletionReport) {
    let mut rows = Vec::new();
    let mut report = DeletionReport::default();
    for (i, obs) in dataset.iter().enumerate() {
        match spec.row(obs) {
            Ok(row) => rows.push((i, row)),
            Err((r, why)) => report.deleted.push((i, DeletionReason::MissingRegressor(r, why))),
        }
    }
    (rows, report)
}

/// Build the design for one agency's ratings on one scale. Rows without
/// that agency's rating or with any missing regressor are deleted.
pub fn build_design_matrix(
    dataset: &[Observation],
    spec: &ModelSpec,
    scale: ScaleKind,
    agency: Agency,
) -> Result<(DesignMatrix, DeletionReport), DesignError> {
    let mut x = Vec::with_capacity(dataset.len() * spec.len());
    let mut y = Vec::with_capacity(dataset.len());
    let mut rows = Vec::with_capacity(dataset.len());
    let mut report = DeletionReport::default();
    for (i, obs) in dataset.iter().enumerate() {
        let Some(grade) = obs.rating(agency) else {
            report.deleted.push((i, DeletionReason::MissingRating(agency)));
            continue;
        };
        match spec.row(obs) {
            Ok(row) => {
                x.extend_from_slice(&row);
                y.push(encode(grade, scale));
                rows.push(i);
            }
            Err((r, why)) => report.deleted.push((i, DeletionReason::MissingRegressor(r, why))),
        }
    }
    if rows.is_empty() {
        return Err(DesignError::EmptyAfterDeletion { deleted: report.len() });
    }
    let data = OrdinalData::new(x, spec.len(), y, scale.n_codes() as usize)?;
    let design = DesignMatrix { data, columns: spec.regressors.clone(), scale, agency, rows };
    Ok((design, report))
}
