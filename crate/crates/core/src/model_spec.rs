//! Regressor lists.
//!
//! A spec is plain text, one regressor per line written `source[:transform]`,
//! with `#` starting a comment. Transforms are `identity` (default), `log10`
//! and `square`. Capitalization always enters in log10 of mln USD: `mkt_cap`
//! and `mkt_cap:log10` are the same column, and `mkt_cap:square` squares the
//! logarithm.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::data::{derive_indicator, DeriveError, Indicator, Industry, Observation};
use crate::math::log10;
use crate::scales::{encode, ScaleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Indicator(Indicator),
    Inflation,
    GdpGrowth,
    CpiCorruption,
    /// Sovereign rating as its 18-gradation code.
    Sovereign,
    Developed,
    Russia,
    /// Industry dummy; manufacturing & chemicals is the omitted baseline.
    Industry(Industry),
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Indicator(i) => i.name(),
            Source::Inflation => "inflation",
            Source::GdpGrowth => "gdp_growth",
            Source::CpiCorruption => "cpi_corruption",
            Source::Sovereign => "sovereign",
            Source::Developed => "developed",
            Source::Russia => "russia",
            Source::Industry(Industry::Telecommunication) => "telecom",
            Source::Industry(i) => i.name(),
        }
    }

    fn is_dummy(self) -> bool {
        matches!(self, Source::Developed | Source::Russia | Source::Industry(_))
    }

    fn all() -> impl Iterator<Item = Source> {
        Indicator::ALL
            .into_iter()
            .map(Source::Indicator)
            .chain([
                Source::Inflation,
                Source::GdpGrowth,
                Source::CpiCorruption,
                Source::Sovereign,
                Source::Developed,
                Source::Russia,
            ])
            .chain(Industry::ALL.into_iter().filter(|i| *i != Industry::ManufacturingChemicals).map(Source::Industry))
    }
}

impl FromStr for Source {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Source::all().find(|src| src.name() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transform {
    Identity,
    Log10,
    Square,
}

impl Transform {
    pub fn name(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Log10 => "log10",
            Transform::Square => "square",
        }
    }
}

impl FromStr for Transform {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(Transform::Identity),
            "log10" => Ok(Transform::Log10),
            "square" => Ok(Transform::Square),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Regressor {
    pub source: Source,
    pub transform: Transform,
}

const MARKET_CAP: Source = Source::Indicator(Indicator::MarketCap);

impl Regressor {
    /// Normalises capitalization to its log10 form.
    pub fn new(source: Source, transform: Transform) -> Self {
        let transform = match (source, transform) {
            (MARKET_CAP, Transform::Identity) => Transform::Log10,
            (_, t) => t,
        };
        Regressor { source, transform }
    }

    pub fn plain(source: Source) -> Self {
        Regressor::new(source, Transform::Identity)
    }

    /// Value of this regressor for one observation.
    pub fn value(&self, obs: &Observation) -> Result<f64, MissingValue> {
        let base = match self.source {
            Source::Indicator(ind) => derive_indicator(obs, ind).map_err(MissingValue::Derive)?,
            Source::Inflation => obs.macros.inflation.ok_or(MissingValue::Field("inflation"))?,
            Source::GdpGrowth => obs.macros.gdp_growth.ok_or(MissingValue::Field("gdp_growth"))?,
            Source::CpiCorruption => obs.macros.cpi_corruption.ok_or(MissingValue::Field("cpi_corruption"))?,
            Source::Sovereign => obs
                .macros
                .sovereign_rating
                .map(|g| encode(g, ScaleKind::Gradations18) as f64)
                .ok_or(MissingValue::Field("sovereign_rating"))?,
            Source::Developed => obs.developed as u8 as f64,
            Source::Russia => obs.russia as u8 as f64,
            Source::Industry(i) => (obs.industry == i) as u8 as f64,
        };
        let log = |v: f64| {
            if v > 0.0 {
                Ok(log10(v))
            } else {
                Err(MissingValue::NonPositiveLog(self.source.name()))
            }
        };
        match (self.source, self.transform) {
            (MARKET_CAP, Transform::Log10) => log(base),
            (MARKET_CAP, Transform::Square) => log(base).map(|v| v * v),
            (_, Transform::Identity) => Ok(base),
            (_, Transform::Log10) => log(base),
            (_, Transform::Square) => Ok(base * base),
        }
    }
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.source, self.transform) {
            (MARKET_CAP, Transform::Log10) | (_, Transform::Identity) => f.write_str(self.source.name()),
            (s, t) => write!(f, "{}:{}", s.name(), t.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MissingValue {
    #[error(transparent)]
    Derive(DeriveError),
    #[error("missing field {0}")]
    Field(&'static str),
    #[error("{0} must be positive to take log10")]
    NonPositiveLog(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown regressor source {name:?}")]
    UnknownSource { line: usize, name: String },
    #[error("line {line}: unknown transform {name:?}")]
    UnknownTransform { line: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelSpec {
    pub regressors: Vec<Regressor>,
}

impl ModelSpec {
    pub fn new(regressors: Vec<Regressor>) -> Self {
        ModelSpec { regressors }
    }

    pub fn len(&self) -> usize {
        self.regressors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regressors.is_empty()
    }

    /// Regressor values for one observation, or the first missing one.
    pub fn row(&self, obs: &Observation) -> Result<Vec<f64>, (Regressor, MissingValue)> {
        self.regressors.iter().map(|r| r.value(obs).map_err(|e| (*r, e))).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.regressors {
            out.push_str(&format!("{r}\n"));
        }
        out
    }
}

/// Parse one `source[:transform]` item.
pub fn parse_regressor(item: &str, line: usize) -> Result<Regressor, SpecError> {
    let mut parts = item.split(':');
    let src = parts.next().unwrap_or_default().trim();
    let source: Source = src.parse().map_err(|_| SpecError::UnknownSource { line, name: src.into() })?;
    let transform = match parts.next() {
        None => Transform::Identity,
        Some(t) => {
            let t = t.trim();
            t.parse().map_err(|_| SpecError::UnknownTransform { line, name: t.into() })?
        }
    };
    if parts.next().is_some() {
        return Err(SpecError::Parse { line, message: format!("more than one transform in {item:?}") });
    }
    if source.is_dummy() && transform != Transform::Identity {
        return Err(SpecError::Parse { line, message: format!("dummy {src} takes no transform") });
    }
    Ok(Regressor::new(source, transform))
}

pub fn parse_model_spec(text: &str) -> Result<ModelSpec, SpecError> {
    let mut regressors: Vec<Regressor> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        let reg = parse_regressor(content, line)?;
        if regressors.contains(&reg) {
            return Err(SpecError::Parse { line, message: format!("duplicate regressor {reg}") });
        }
        regressors.push(reg);
    }
    if regressors.is_empty() {
        return Err(SpecError::Parse { line: last_line.max(1), message: "spec lists no regressors".into() });
    }
    Ok(ModelSpec { regressors })
}

pub const PRESET_NAMES: [&str; 8] =
    ["base_sp", "quadratic_sp", "market_sp", "base_moodys", "mixed_sp", "mixed_market_sp", "mixed_moodys", "split_1s"];

const INDUSTRIES: &str = "telecom\nmetal_mining\noil_gas\nconsumer\nutilities\n";

/// Named variable sets for the standard rating and disagreement models.
pub fn preset(name: &str) -> Option<ModelSpec> {
    let text: String = match name {
        "base_sp" => format!(
            "mkt_cap\nroa\nebitda_interest\nlt_debt_capital\ndebt_ebitda\nliquidity\n{INDUSTRIES}inflation\ngdp_growth\ndeveloped\n"
        ),
        "quadratic_sp" => format!(
            "mkt_cap\nmkt_cap:square\nroa\nroa:square\nebitda_interest\nebitda_interest:square\nlt_debt_capital\ndebt_ebitda\n{INDUSTRIES}inflation\ngdp_growth\ndeveloped\n"
        ),
        "market_sp" => format!(
            "mkt_cap\nebitda_interest\nvolatility\nprice_cash_flow\n{INDUSTRIES}inflation\ngdp_growth\n"
        ),
        "base_moodys" => format!(
            "mkt_cap\nroa\nebitda_interest\nlt_debt_capital\ncash_flow_sales\nliquidity\n{INDUSTRIES}inflation\ngdp_growth\ndeveloped\n"
        ),
        "mixed_sp" | "mixed_moodys" => String::from(
            "mkt_cap\nebitda_interest\nroa\nlt_debt_capital\ninflation\ngdp_growth\noil_gas\nutilities\ndeveloped\n",
        ),
        "mixed_market_sp" => String::from(
            "volatility\nprice_cash_flow\nmkt_cap\nebitda_interest\nroa\ninflation\ngdp_growth\nmetal_mining\noil_gas\nutilities\n",
        ),
        "split_1s" => String::from("volatility\ndeveloped\n"),
        _ => return None,
    };
    Some(parse_model_spec(&text).expect("presets are valid specs"))
}
