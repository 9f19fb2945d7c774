//! JSON artifacts: fitted models, reports and generator sidecars.
//!
//! Every float is written with 17 significant digits and object keys are
//! sorted, so identical runs produce identical bytes.

use std::io;
use std::path::Path;

use ratingprobit_core::design::DesignMatrix;
use ratingprobit_core::model_spec::{parse_regressor, ModelSpec, Regressor};
use ratingprobit_core::oprobit::{FitDiagnostics, OrderedProbitModel, ProbitError};
use ratingprobit_core::scales::{Agency, ScaleKind};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;
use thiserror::Error;

struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Canonical JSON text of `value`, newline terminated.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    // Going through `Value` sorts every object's keys.
    let tree: Value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    tree.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnEntry {
    pub name: String,
    pub transform: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsEntry {
    pub loglik: f64,
    pub loglik_null: f64,
    pub pseudo_r2_mcfadden: f64,
    pub se: Vec<f64>,
    pub z: Vec<f64>,
    pub stars: Vec<String>,
    pub n_obs: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// What the response categories of a disagreement model mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCoding {
    /// `delta`, `fds` or `split`.
    pub measure: String,
    /// Measure value of category 1; category `k` is `offset + k - 1`.
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub scale_kind: String,
    pub agency: String,
    pub columns: Vec<ColumnEntry>,
    pub beta: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub diagnostics: DiagnosticsEntry,
    /// Present only for disagreement models, whose categories are not
    /// rating codes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<ResponseCoding>,
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("cannot read model {path}: {source}")]
    Unreadable { path: String, source: io::Error },
    #[error("model {path} is not a valid artifact: {source}")]
    Malformed { path: String, source: serde_json::Error },
    #[error("model artifact: {0}")]
    Invalid(String),
}

/// A loaded artifact, checked for internal consistency.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub spec: ModelSpec,
    pub model: OrderedProbitModel,
    pub scale: ScaleKind,
    pub agency: Agency,
    pub artifact: ModelArtifact,
}

impl ModelArtifact {
    pub fn new(
        columns: &[Regressor],
        scale: ScaleKind,
        agency: Agency,
        model: &OrderedProbitModel,
        diag: &FitDiagnostics,
    ) -> Self {
        ModelArtifact {
            scale_kind: scale.name().to_string(),
            agency: agency.name().to_string(),
            columns: columns
                .iter()
                .map(|r| ColumnEntry { name: r.source.name().to_string(), transform: r.transform.name().to_string() })
                .collect(),
            beta: model.beta().to_vec(),
            thresholds: model.thresholds().to_vec(),
            diagnostics: DiagnosticsEntry {
                loglik: diag.loglik,
                loglik_null: diag.loglik_null,
                pseudo_r2_mcfadden: diag.pseudo_r2_mcfadden,
                se: diag.se.clone(),
                z: diag.z.clone(),
                stars: diag.stars.iter().map(|s| s.stars().to_string()).collect(),
                n_obs: diag.n_obs,
                iterations: diag.iterations,
                converged: diag.converged,
            },
            response: None,
        }
    }

    pub fn from_design(design: &DesignMatrix, model: &OrderedProbitModel, diag: &FitDiagnostics) -> Self {
        Self::new(&design.columns, design.scale, design.agency, model, diag)
    }

    pub fn into_model(self) -> Result<LoadedModel, ArtifactError> {
        let invalid = |m: String| ArtifactError::Invalid(m);
        let scale: ScaleKind = self.scale_kind.parse().map_err(|e| invalid(format!("{e}")))?;
        let agency: Agency = self.agency.parse().map_err(|e| invalid(format!("{e}")))?;
        let regressors = self
            .columns
            .iter()
            .map(|c| parse_regressor(&format!("{}:{}", c.name, c.transform), 1).map_err(|e| invalid(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if regressors.len() != self.beta.len() {
            return Err(invalid(format!("{} columns but {} coefficients", regressors.len(), self.beta.len())));
        }
        let model = OrderedProbitModel::new(self.beta.clone(), self.thresholds.clone())
            .map_err(|e: ProbitError| invalid(e.to_string()))?;
        if self.response.is_none() && model.n_classes() != scale.n_codes() as usize {
            return Err(invalid(format!(
                "{} thresholds do not fit the {} scale ({} codes)",
                self.thresholds.len(),
                scale,
                scale.n_codes()
            )));
        }
        Ok(LoadedModel { spec: ModelSpec::new(regressors), model, scale, agency, artifact: self })
    }

    pub fn load(path: &Path) -> Result<LoadedModel, ArtifactError> {
        let shown = path.display().to_string();
        let text = std::fs::read(path).map_err(|source| ArtifactError::Unreadable { path: shown.clone(), source })?;
        let artifact: ModelArtifact =
            serde_json::from_slice(&text).map_err(|source| ArtifactError::Malformed { path: shown, source })?;
        artifact.into_model()
    }
}
