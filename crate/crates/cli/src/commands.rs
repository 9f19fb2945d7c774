use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ratingprobit_core::compare::{self, compute_measures, fit_disagreement_models, DisagreementFits, FittedModel};
use ratingprobit_core::data::{align_lag, Observation};
use ratingprobit_core::design::{build_design_matrix, regressor_rows, DeletionReport, DesignError};
use ratingprobit_core::eval::{evaluate, histogram_csv, EvalError};
use ratingprobit_core::model_spec::{parse_model_spec, preset, ModelSpec, PRESET_NAMES};
use ratingprobit_core::oprobit::{fit as fit_model, FitOptions, OrderedProbitModel, ProbitError};
use ratingprobit_core::scales::{decode, Agency, ScaleKind};
use ratingprobit_core::stats::{descriptive_stats, indicator_column, SUMMARY_INDICATORS};
use ratingprobit_core::synth::{
    generate_dataset, CopulaPlan, GeneratorConfig, MacroDistribution, MarginFamily, SynthError,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::artifact::{to_json, ArtifactError, LoadedModel, ModelArtifact, ResponseCoding};
use crate::dataset::{load_dataset, load_ratings, load_return_series, write_dataset, LoadError};
use crate::{CompareArgs, EvalArgs, FitArgs, InputArgs, PredictArgs, ScalesArgs, StatsArgs, SynthArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Convergence(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ArtifactError> for CliError {
    fn from(e: ArtifactError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ProbitError> for CliError {
    fn from(e: ProbitError) -> Self {
        match e {
            ProbitError::NotConverged { .. } | ProbitError::SingularHessian => CliError::Convergence(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Probit(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Probit(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, bytes),
        None => std::io::stdout().lock().write_all(bytes).map_err(internal),
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    to_json(value).map_err(internal)
}

/// Dataset with optional lagged rating join and market measures from returns.
fn load_input(args: &InputArgs) -> Result<Vec<Observation>, CliError> {
    if !args.vol_exponent.is_finite() || args.vol_exponent <= 0.0 {
        return Err(CliError::Input(format!("--vol-exponent must be positive, got {}", args.vol_exponent)));
    }
    let mut data = load_dataset(&args.data, args.max_row_errors)?.rows;
    if let Some(dir) = &args.returns {
        if !dir.is_dir() {
            return Err(CliError::Input(format!("returns directory {} does not exist", dir.display())));
        }
        for obs in &mut data {
            if obs.beta.is_some() && obs.volatility.is_some() {
                continue;
            }
            if let Some(series) = load_return_series(dir, &obs.company_id)? {
                if let Err(e) = obs.fill_market_measures(&series, args.vol_exponent) {
                    log::warn!("{}: market measures unavailable: {e}", obs.company_id);
                }
            }
        }
    }
    if let Some(path) = &args.ratings {
        let ratings = load_ratings(path, args.max_row_errors)?.rows;
        let join = align_lag(&data, &ratings, args.lag_months);
        if !join.unmatched.is_empty() {
            log::warn!(
                "{} of {} ratings have no financials at least {} months older",
                join.unmatched.len(),
                ratings.len(),
                args.lag_months
            );
        }
        data = join.joined;
    }
    Ok(data)
}

fn resolve_spec(name: &str) -> Result<ModelSpec, CliError> {
    if let Some(spec) = preset(name) {
        return Ok(spec);
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(CliError::Input(format!(
            "--spec {name:?} is neither a file nor a preset ({})",
            PRESET_NAMES.join(", ")
        )));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {name}: {e}")))?;
    parse_model_spec(&text).map_err(|e| CliError::Input(format!("{name}: {e}")))
}

fn log_deletions(report: &DeletionReport, total: usize) {
    if report.is_empty() {
        return;
    }
    log::warn!("listwise deletion dropped {} of {total} rows", report.len());
    for (i, why) in report.deleted.iter().take(5) {
        log::info!("row {}: {why:?}", i + 1);
    }
}

pub(crate) fn scales(args: ScalesArgs) -> Result<(), CliError> {
    let kinds: Vec<ScaleKind> = match args.scale {
        Some(k) => vec![k],
        None => ScaleKind::ALL.to_vec(),
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["kind", "code", "label", "members"]).map_err(internal)?;
    for kind in kinds {
        for b in kind.map().buckets {
            w.write_record([kind.name(), &b.code.to_string(), b.label, &b.members.join(" ")]).map_err(internal)?;
        }
    }
    emit(args.out.as_ref(), &w.into_inner().map_err(internal)?)
}

pub(crate) fn stats(args: StatsArgs) -> Result<(), CliError> {
    let data = load_input(&args.input)?;
    let columns: Vec<_> = SUMMARY_INDICATORS.iter().map(|i| indicator_column(&data, *i)).collect();
    let stats = descriptive_stats(&columns).map_err(|e| CliError::Input(e.to_string()))?;
    let k = stats.columns.len();
    let value = json!({
        "n_rows": data.len(),
        "columns": stats.columns.iter().map(|c| json!({
            "name": c.name, "n": c.n, "mean": c.mean, "median": c.median,
            "max": c.max, "min": c.min, "sd": c.sd,
        })).collect::<Vec<_>>(),
        "correlation": (0..k).map(|i| (0..k).map(|j| stats.corr(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    emit(args.out.as_ref(), &json_bytes(&value)?)
}

fn family_name(f: MarginFamily) -> &'static str {
    match f {
        MarginFamily::ShiftedLognormal => "shifted_lognormal",
        MarginFamily::ClippedNormal => "clipped_normal",
    }
}

fn macro_json(m: &MacroDistribution) -> Value {
    json!({
        "inflation": {"mean": m.inflation.mean, "sd": m.inflation.sd},
        "gdp_growth": {"mean": m.gdp_growth.mean, "sd": m.gdp_growth.sd},
        "cpi_corruption": {"mean": m.cpi_corruption.mean, "sd": m.cpi_corruption.sd},
        "sovereign": m.sovereign,
    })
}

fn spec_names(spec: &ModelSpec) -> Vec<String> {
    spec.regressors.iter().map(|r| r.to_string()).collect()
}

fn sidecar(config: &GeneratorConfig) -> Result<Value, CliError> {
    let plan = CopulaPlan::new(config)?;
    let k = config.margins.len();
    let rows = |m: &[f64]| (0..k).map(|i| m[i * k..(i + 1) * k].to_vec()).collect::<Vec<_>>();
    let margins: Vec<Value> = SUMMARY_INDICATORS
        .iter()
        .zip(config.margins.iter().zip(&plan.margins))
        .map(|(ind, (t, m))| {
            json!({
                "indicator": indicator_column(&[], *ind).name,
                "family": family_name(t.family),
                "mean": t.mean, "sd": t.sd, "min": t.min, "max": t.max,
                "mu": m.mu, "sigma": m.sigma,
            })
        })
        .collect();
    let classes = config.ratings.classes8_model();
    Ok(json!({
        "seed": config.seed,
        "n": config.n,
        "as_of": config.as_of.to_string(),
        "margins": margins,
        "target_correlation": rows(&config.correlation),
        "latent_correlation": rows(&plan.latent_correlation),
        "developed_share": config.developed_share,
        "russia_share_of_developing": config.russia_share_of_developing,
        "industry_weights": ratingprobit_core::data::Industry::ALL.iter().zip(config.industry_weights)
            .map(|(i, w)| (i.name().to_string(), json!(w))).collect::<serde_json::Map<_, _>>(),
        "macros": {
            "developed": macro_json(&config.macros.developed),
            "developing": macro_json(&config.macros.developing),
            "russia": macro_json(&config.macros.russia),
        },
        "sp_model": {
            "columns": spec_names(&config.ratings.spec),
            "beta": config.ratings.beta,
            "notch_thresholds": config.ratings.notch_thresholds,
            "classes8_thresholds": classes.thresholds(),
        },
        "split_model": {
            "columns": spec_names(&config.split.spec),
            "beta": config.split.beta,
            "threshold": config.split.threshold,
            "two_step_share": config.split.two_step_share,
            "sp_worse_share": config.split.sp_worse_share,
            "space": ScaleKind::Gradations18.name(),
        },
    }))
}

pub(crate) fn synth(args: SynthArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Input("--n must be positive".into()));
    }
    let config = GeneratorConfig { n: args.n, seed: args.seed, ..Default::default() };
    let data = generate_dataset(&config)?;
    let mut csv_bytes = Vec::new();
    write_dataset(&mut csv_bytes, &data).map_err(internal)?;
    write_file(&args.out, &csv_bytes)?;
    let side = args.sidecar.clone().unwrap_or_else(|| args.out.with_extension("json"));
    if side == args.out {
        return Err(CliError::Input("the sidecar path must differ from --out".into()));
    }
    write_file(&side, &json_bytes(&sidecar(&config)?)?)?;
    log::info!("wrote {} issuers to {} and settings to {}", data.len(), args.out.display(), side.display());
    Ok(())
}

fn coefficient_table(
    names: &[String],
    model: &OrderedProbitModel,
    diag: &ratingprobit_core::oprobit::FitDiagnostics,
) -> String {
    let mut out = String::new();
    let labels = names.iter().cloned().chain((1..=model.thresholds().len()).map(|k| format!("cut{k}")));
    let values = model.beta().iter().chain(model.thresholds());
    for (i, (label, v)) in labels.zip(values).enumerate() {
        let _ = writeln!(out, "  {label:<24} {v:>10.4} ({:.4}){}", diag.se[i], diag.stars[i].stars());
    }
    let _ = writeln!(
        out,
        "  n = {}, lnL = {:.3}, pseudo-R2 = {:.4}, iterations = {}",
        diag.n_obs, diag.loglik, diag.pseudo_r2_mcfadden, diag.iterations
    );
    out
}

pub(crate) fn fit(args: FitArgs) -> Result<(), CliError> {
    let spec = resolve_spec(&args.spec)?;
    let data = load_input(&args.input)?;
    let (design, deleted) = build_design_matrix(&data, &spec, args.scale, args.agency)?;
    log_deletions(&deleted, data.len());
    let (model, diag) = fit_model(&design.data, &FitOptions::default())?;
    eprint!("{}", coefficient_table(&spec_names(&spec), &model, &diag));
    let artifact = ModelArtifact::from_design(&design, &model, &diag);
    emit(args.out.as_ref(), &json_bytes(&artifact)?)
}

/// Label of a predicted category.
fn category_label(loaded: &LoadedModel, k: u32) -> String {
    match &loaded.artifact.response {
        Some(coding) => (coding.offset + k as i64 - 1).to_string(),
        None => decode(k, loaded.scale).map(str::to_string).unwrap_or_default(),
    }
}

pub(crate) fn predict(args: PredictArgs) -> Result<(), CliError> {
    let loaded = ModelArtifact::load(&args.model)?;
    let data = load_input(&args.input)?;
    let (rows, deleted) = regressor_rows(&data, &loaded.spec);
    log_deletions(&deleted, data.len());
    let k = loaded.model.n_classes();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["row".to_string(), "company_id".into(), "as_of".into(), "predicted".into(), "label".into()];
    header.extend((1..=k).map(|c| format!("p{c}")));
    w.write_record(&header).map_err(internal)?;
    for (i, x) in &rows {
        let probs = loaded.model.class_probabilities(x)?;
        let code = probs.argmax();
        let obs = &data[*i];
        let mut rec = vec![
            (i + 1).to_string(),
            obs.company_id.clone(),
            obs.as_of.to_string(),
            code.to_string(),
            category_label(&loaded, code),
        ];
        rec.extend(probs.as_slice().iter().map(|p| p.to_string()));
        w.write_record(&rec).map_err(internal)?;
    }
    emit(args.out.as_ref(), &w.into_inner().map_err(internal)?)
}

fn pct(share: f64) -> String {
    format!("{:.1}%", 100.0 * share)
}

pub(crate) fn eval(args: EvalArgs) -> Result<(), CliError> {
    let loaded = ModelArtifact::load(&args.model)?;
    if loaded.artifact.response.is_some() {
        return Err(CliError::Input(format!("{} is a disagreement model, not a rating model", args.model.display())));
    }
    if let Some(scale) = args.scale {
        if scale != loaded.scale {
            return Err(CliError::Input(format!(
                "scale mismatch: the model was fitted on {} but --scale is {scale}",
                loaded.scale
            )));
        }
    }
    let agency = args.agency.unwrap_or(loaded.agency);
    let data = load_input(&args.input)?;
    let (design, deleted) = build_design_matrix(&data, &loaded.spec, loaded.scale, agency)?;
    log_deletions(&deleted, data.len());
    let predicted = (0..design.data.n_rows())
        .map(|i| loaded.model.predict_class(design.data.row(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let report = evaluate(design.data.response(), &predicted)?;
    eprintln!(
        "n = {}: exact {}, |d|=1 {}, |d|=2 {}, |d|<=1 {}, |d|<=2 {}",
        report.n,
        pct(report.share_exact),
        pct(report.share_abs1),
        pct(report.share_abs2),
        pct(report.share_within1),
        pct(report.share_within2)
    );
    let value = json!({
        "scale_kind": loaded.scale.name(),
        "agency": agency.name(),
        "n": report.n,
        "n_deleted": deleted.len(),
        "delta": report.delta,
        "share_exact": report.share_exact,
        "share_abs1": report.share_abs1,
        "share_abs2": report.share_abs2,
        "share_within1": report.share_within1,
        "share_within2": report.share_within2,
        "histogram": report.histogram.iter().map(|(d, c)| json!({"delta": d, "count": c})).collect::<Vec<_>>(),
    });
    if let Some(path) = &args.histogram {
        write_file(path, histogram_csv(&report.histogram).as_bytes())?;
    }
    emit(args.out.as_ref(), &json_bytes(&value)?)
}

fn model_status(
    name: &str,
    result: &Result<FittedModel, ProbitError>,
    columns: &ModelSpec,
    scale: ScaleKind,
    offset: i64,
    dir: &Path,
) -> Result<Value, CliError> {
    match result {
        Ok((model, diag)) => {
            let mut artifact = ModelArtifact::new(&columns.regressors, scale, Agency::SP, model, diag);
            artifact.response = Some(ResponseCoding { measure: name.to_string(), offset });
            let file = format!("model_{name}.json");
            write_file(&dir.join(&file), &json_bytes(&artifact)?)?;
            Ok(json!({"status": "ok", "file": file, "pseudo_r2_mcfadden": diag.pseudo_r2_mcfadden}))
        }
        Err(e) => {
            log::warn!("{name} model not estimated: {e}");
            Ok(json!({"status": "failed", "error": e.to_string()}))
        }
    }
}

pub(crate) fn compare(args: CompareArgs) -> Result<(), CliError> {
    let spec = resolve_spec(&args.spec)?;
    let data = load_input(&args.input)?;
    let pairs = compare::pair(&data, args.scale, &spec);
    if pairs.is_empty() {
        return Err(CliError::Input("no observation is rated by both agencies".into()));
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.out.display())))?;
    let measures: Vec<_> = pairs.iter().map(|p| compute_measures(p, args.delta_sign)).collect();

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["company_id", "delta", "fds", "split"]).map_err(internal)?;
    for (p, m) in pairs.iter().zip(&measures) {
        w.write_record([p.company_id.clone(), m.delta.to_string(), m.fds.to_string(), m.split.to_string()])
            .map_err(internal)?;
    }
    write_file(&args.out.join("measures.csv"), &w.into_inner().map_err(internal)?)?;

    let summary = compare::summarize(&measures)?;
    write_file(&args.out.join("histogram.csv"), histogram_csv(&summary.histogram).as_bytes())?;

    let DisagreementFits { n_used, min_delta, delta, fds, split } =
        fit_disagreement_models(&pairs, spec.len(), args.delta_sign, &FitOptions::default());
    let models = json!({
        "delta": model_status("delta", &delta, &spec, args.scale, min_delta, &args.out)?,
        "fds": model_status("fds", &fds, &spec, args.scale, 0, &args.out)?,
        "split": model_status("split", &split, &spec, args.scale, 0, &args.out)?,
    });
    eprintln!("{} pairs, mean delta {:.2} ({})", summary.n, summary.mean_delta, args.delta_sign);
    let value = json!({
        "scale_kind": args.scale.name(),
        "delta_sign": args.delta_sign.name(),
        "columns": spec_names(&spec),
        "n_pairs": summary.n,
        "n_modelled": n_used,
        "mean_delta": summary.mean_delta,
        "mean_delta_rounded": format!("{:.2}", summary.mean_delta),
        "histogram": summary.histogram.iter().map(|(d, c)| json!({"delta": d, "count": c})).collect::<Vec<_>>(),
        "estimator": "ordered probit for delta and fds, binary probit for split",
        "models": models,
    });
    write_file(&args.out.join("summary.json"), &json_bytes(&value)?)
}
