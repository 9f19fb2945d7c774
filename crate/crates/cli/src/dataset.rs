//! The issuer dataset CSV, per-company return series and rating files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ratingprobit_core::data::{Date, Financials, Industry, Observation, RatingRecord, RawField, ReturnSeries};
use ratingprobit_core::scales::{Agency, RatingGrade};
use thiserror::Error;

/// Header of the dataset CSV, in output order.
pub const DATASET_COLUMNS: [&str; 30] = [
    "company_id",
    "as_of",
    "sp_rating",
    "moodys_rating",
    "mkt_cap_musd",
    "price",
    "eps",
    "net_earnings",
    "avg_assets",
    "operating_revenue",
    "receipts",
    "debt",
    "ebitda",
    "cash_flow",
    "lt_debt",
    "total_capital",
    "interest_expense",
    "st_assets",
    "st_liabilities",
    "fixed_assets",
    "total_assets",
    "beta",
    "volatility",
    "inflation",
    "gdp_growth",
    "cpi_corruption",
    "sovereign_rating",
    "developed",
    "russia",
    "industry",
];

pub const DEFAULT_MAX_ROW_ERRORS: usize = 100;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    FileUnreadable { path: PathBuf, source: std::io::Error },
    #[error("{path}: header mismatch (missing {missing:?}, unexpected {unexpected:?})")]
    HeaderMismatch { path: PathBuf, missing: Vec<String>, unexpected: Vec<String> },
    #[error("{path}: malformed CSV: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: more than {cap} rejected rows; first: {first}")]
    TooManyRowErrors { path: PathBuf, cap: usize, first: RowError },
}

/// A rejected data row; `row` counts data rows from 1, excluding the header.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("row {row}, column {column}: {message}")]
pub struct RowError {
    pub row: usize,
    pub column: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct Loaded<T> {
    pub rows: Vec<T>,
    pub skipped: Vec<RowError>,
}

fn read_all(path: &Path) -> Result<String, LoadError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| LoadError::FileUnreadable { path: path.to_path_buf(), source })?;
    Ok(text)
}

/// Column positions by name, requiring exactly `expected`.
fn header_index(
    path: &Path,
    header: &csv::StringRecord,
    expected: &[&str],
) -> Result<HashMap<String, usize>, LoadError> {
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let missing: Vec<String> =
        expected.iter().filter(|e| !names.iter().any(|n| n == *e)).map(|e| e.to_string()).collect();
    let mut unexpected: Vec<String> = names.iter().filter(|n| !expected.contains(&n.as_str())).cloned().collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) && !unexpected.contains(n) {
            unexpected.push(n.clone());
        }
    }
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(LoadError::HeaderMismatch { path: path.to_path_buf(), missing, unexpected });
    }
    Ok(names.into_iter().enumerate().map(|(i, n)| (n, i)).collect())
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    index: &'a HashMap<String, usize>,
    row: usize,
}

impl Row<'_> {
    fn text(&self, column: &str) -> &str {
        self.record.get(self.index[column]).unwrap_or("").trim()
    }

    fn fail(&self, column: &str, message: impl Into<String>) -> RowError {
        RowError { row: self.row, column: column.to_string(), message: message.into() }
    }

    fn number(&self, column: &str) -> Result<Option<f64>, RowError> {
        let text = self.text(column);
        if text.is_empty() {
            return Ok(None);
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(self.fail(column, format!("not a finite number: {text:?}"))),
        }
    }

    fn grade(&self, column: &str, agency: Agency) -> Result<Option<RatingGrade>, RowError> {
        let text = self.text(column);
        if text.is_empty() {
            return Ok(None);
        }
        RatingGrade::parse(agency, text).map(Some).map_err(|e| self.fail(column, e.to_string()))
    }

    fn flag(&self, column: &str) -> Result<bool, RowError> {
        match self.text(column) {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(self.fail(column, format!("expected 0 or 1, found {other:?}"))),
        }
    }

    fn date(&self, column: &str) -> Result<Date, RowError> {
        self.text(column).parse().map_err(|e: ratingprobit_core::data::DateError| self.fail(column, e.0))
    }

    fn company(&self) -> Result<String, RowError> {
        let id = self.text("company_id");
        if id.is_empty() {
            return Err(self.fail("company_id", "empty company id"));
        }
        Ok(id.to_string())
    }
}

fn parse_observation(row: &Row) -> Result<Observation, RowError> {
    let industry: Industry =
        row.text("industry").parse().map_err(|s: String| row.fail("industry", format!("unknown industry {s:?}")))?;
    let mut obs = Observation::new(row.company()?, row.date("as_of")?, industry);
    obs.sp_rating = row.grade("sp_rating", Agency::SP)?;
    obs.moodys_rating = row.grade("moodys_rating", Agency::Moodys)?;
    let mut financials = Financials::default();
    for field in RawField::ALL {
        financials.set(field, row.number(field.column())?);
    }
    obs.financials = financials;
    obs.beta = row.number("beta")?;
    obs.volatility = row.number("volatility")?;
    if obs.volatility.is_some_and(|v| v < 0.0) {
        return Err(row.fail("volatility", "volatility must be non-negative"));
    }
    obs.macros.inflation = row.number("inflation")?;
    obs.macros.gdp_growth = row.number("gdp_growth")?;
    obs.macros.cpi_corruption = row.number("cpi_corruption")?;
    obs.macros.sovereign_rating = row.grade("sovereign_rating", Agency::SP)?;
    obs.developed = row.flag("developed")?;
    obs.russia = row.flag("russia")?;
    obs.validate().map_err(|e| row.fail("russia", e.to_string()))?;
    Ok(obs)
}

/// Parse rows with `parse`, collecting rejected rows up to `max_row_errors`.
fn load_rows<T>(
    path: &Path,
    expected: &[&str],
    max_row_errors: usize,
    parse: impl Fn(&Row) -> Result<T, RowError>,
) -> Result<Loaded<T>, LoadError> {
    let text = read_all(path)?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let csv_err = |source| LoadError::Csv { path: path.to_path_buf(), source };
    let header = reader.headers().map_err(csv_err)?.clone();
    let index = header_index(path, &header, expected)?;
    let mut out = Loaded { rows: Vec::new(), skipped: Vec::new() };
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = Row { record: &record, index: &index, row: i + 1 };
        let parsed = if record.len() != header.len() {
            Err(row.fail("*", format!("expected {} fields, found {}", header.len(), record.len())))
        } else {
            parse(&row)
        };
        match parsed {
            Ok(v) => out.rows.push(v),
            Err(e) => {
                log::warn!("{}: skipping {e}", path.display());
                out.skipped.push(e);
                if out.skipped.len() > max_row_errors {
                    return Err(LoadError::TooManyRowErrors {
                        path: path.to_path_buf(),
                        cap: max_row_errors,
                        first: out.skipped[0].clone(),
                    });
                }
            }
        }
    }
    if out.rows.is_empty() && out.skipped.is_empty() {
        log::warn!("{}: no data rows", path.display());
    }
    Ok(out)
}

pub fn load_dataset(path: &Path, max_row_errors: usize) -> Result<Loaded<Observation>, LoadError> {
    let loaded = load_rows(path, &DATASET_COLUMNS, max_row_errors, parse_observation)?;
    log::info!("{}: loaded {} rows, skipped {}", path.display(), loaded.rows.len(), loaded.skipped.len());
    Ok(loaded)
}

pub const RATING_COLUMNS: [&str; 4] = ["company_id", "as_of", "sp_rating", "moodys_rating"];

/// Rating observations to be joined to earlier financials.
pub fn load_ratings(path: &Path, max_row_errors: usize) -> Result<Loaded<RatingRecord>, LoadError> {
    load_rows(path, &RATING_COLUMNS, max_row_errors, |row| {
        Ok(RatingRecord {
            company_id: row.company()?,
            as_of: row.date("as_of")?,
            sp_rating: row.grade("sp_rating", Agency::SP)?,
            moodys_rating: row.grade("moodys_rating", Agency::Moodys)?,
        })
    })
}

pub const RETURN_COLUMNS: [&str; 3] = ["date", "r_i", "r_m"];

/// `<dir>/<company_id>.csv` with columns `date,r_i,r_m`; returns `None`
/// when the company has no file.
pub fn load_return_series(dir: &Path, company_id: &str) -> Result<Option<ReturnSeries>, LoadError> {
    let path = dir.join(format!("{company_id}.csv"));
    if !path.exists() {
        return Ok(None);
    }
    let loaded = load_rows(&path, &RETURN_COLUMNS, 0, |row| {
        let r_i = row.number("r_i")?.ok_or_else(|| row.fail("r_i", "missing return"))?;
        let r_m = row.number("r_m")?.ok_or_else(|| row.fail("r_m", "missing return"))?;
        Ok((r_i, r_m))
    })?;
    let (equity, market) = loaded.rows.into_iter().unzip();
    Ok(Some(ReturnSeries { equity, market }))
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write observations in [`DATASET_COLUMNS`] order with LF line endings.
/// Numbers use the shortest representation that parses back exactly.
pub fn write_dataset<W: Write>(out: W, dataset: &[Observation]) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(DATASET_COLUMNS)?;
    for obs in dataset {
        let mut rec: Vec<String> = vec![
            obs.company_id.clone(),
            obs.as_of.to_string(),
            obs.sp_rating.map(|g| g.symbol().to_string()).unwrap_or_default(),
            obs.moodys_rating.map(|g| g.symbol().to_string()).unwrap_or_default(),
        ];
        rec.extend(RawField::ALL.iter().map(|f| cell(obs.financials.get(*f))));
        rec.extend([
            cell(obs.beta),
            cell(obs.volatility),
            cell(obs.macros.inflation),
            cell(obs.macros.gdp_growth),
            cell(obs.macros.cpi_corruption),
            obs.macros.sovereign_rating.map(|g| g.symbol().to_string()).unwrap_or_default(),
            (obs.developed as u8).to_string(),
            (obs.russia as u8).to_string(),
            obs.industry.name().to_string(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
