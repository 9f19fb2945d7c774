//! Observations, Table-style financial indicators and lag alignment.
//!
//! Unit conventions: return on assets, operating margin, cash flow to sales
//! and long-term debt to capital are percentages; every other ratio is a
//! plain ratio. Monetary amounts are in mln USD.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::math::{powf, sqrt};
use crate::scales::{Agency, RatingGrade};

/// Calendar date. Only the month index matters for lag arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid date {0:?} (expected YYYY-MM-DD)")]
pub struct DateError(pub String);

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Option<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Date { year, month, day })
    }

    /// Months since year 0, ignoring the day of month.
    pub fn month_index(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    /// Whole calendar months from `earlier` to `self`.
    pub fn months_since(self, earlier: Date) -> i64 {
        self.month_index() - earlier.month_index()
    }
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        4 | 6 | 9 | 11 => 30,
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        2 => 28,
        _ => 31,
    }
}

impl FromStr for Date {
    type Err = DateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DateError(s.into());
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return Err(bad());
        }
        let year: i32 = s[0..4].parse().map_err(|_| bad())?;
        let month: u8 = s[5..7].parse().map_err(|_| bad())?;
        let day: u8 = s[8..10].parse().map_err(|_| bad())?;
        Date::new(year, month, day).ok_or_else(bad)
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Industry {
    Telecommunication,
    OilGas,
    MetalMining,
    Consumer,
    Utilities,
    ManufacturingChemicals,
}

impl Industry {
    pub const ALL: [Industry; 6] = [
        Industry::Telecommunication,
        Industry::OilGas,
        Industry::MetalMining,
        Industry::Consumer,
        Industry::Utilities,
        Industry::ManufacturingChemicals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Industry::Telecommunication => "telecommunication",
            Industry::OilGas => "oil_gas",
            Industry::MetalMining => "metal_mining",
            Industry::Consumer => "consumer",
            Industry::Utilities => "utilities",
            Industry::ManufacturingChemicals => "manufacturing_chemicals",
        }
    }
}

impl FromStr for Industry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Industry::ALL.into_iter().find(|i| i.name() == s).ok_or_else(|| s.into())
    }
}

/// Raw accounting inputs, in the order of the dataset CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RawField {
    MktCapMusd,
    Price,
    Eps,
    NetEarnings,
    AvgAssets,
    OperatingRevenue,
    Receipts,
    Debt,
    Ebitda,
    CashFlow,
    LtDebt,
    TotalCapital,
    InterestExpense,
    StAssets,
    StLiabilities,
    FixedAssets,
    TotalAssets,
}

impl RawField {
    pub const ALL: [RawField; 17] = [
        RawField::MktCapMusd,
        RawField::Price,
        RawField::Eps,
        RawField::NetEarnings,
        RawField::AvgAssets,
        RawField::OperatingRevenue,
        RawField::Receipts,
        RawField::Debt,
        RawField::Ebitda,
        RawField::CashFlow,
        RawField::LtDebt,
        RawField::TotalCapital,
        RawField::InterestExpense,
        RawField::StAssets,
        RawField::StLiabilities,
        RawField::FixedAssets,
        RawField::TotalAssets,
    ];

    pub fn column(self) -> &'static str {
        match self {
            RawField::MktCapMusd => "mkt_cap_musd",
            RawField::Price => "price",
            RawField::Eps => "eps",
            RawField::NetEarnings => "net_earnings",
            RawField::AvgAssets => "avg_assets",
            RawField::OperatingRevenue => "operating_revenue",
            RawField::Receipts => "receipts",
            RawField::Debt => "debt",
            RawField::Ebitda => "ebitda",
            RawField::CashFlow => "cash_flow",
            RawField::LtDebt => "lt_debt",
            RawField::TotalCapital => "total_capital",
            RawField::InterestExpense => "interest_expense",
            RawField::StAssets => "st_assets",
            RawField::StLiabilities => "st_liabilities",
            RawField::FixedAssets => "fixed_assets",
            RawField::TotalAssets => "total_assets",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Financials([Option<f64>; 17]);

impl Financials {
    pub fn get(&self, field: RawField) -> Option<f64> {
        self.0[field.index()]
    }

    pub fn set(&mut self, field: RawField, value: Option<f64>) {
        self.0[field.index()] = value;
    }

    pub fn with(mut self, field: RawField, value: f64) -> Self {
        self.set(field, Some(value));
        self
    }
}

/// Country-level covariates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MacroCovariates {
    /// % per year.
    pub inflation: Option<f64>,
    /// Real GDP growth, % per year.
    pub gdp_growth: Option<f64>,
    /// Corruption perception index; higher means less corruption.
    pub cpi_corruption: Option<f64>,
    pub sovereign_rating: Option<RatingGrade>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub company_id: String,
    pub as_of: Date,
    pub sp_rating: Option<RatingGrade>,
    pub moodys_rating: Option<RatingGrade>,
    pub financials: Financials,
    pub beta: Option<f64>,
    pub volatility: Option<f64>,
    pub macros: MacroCovariates,
    pub developed: bool,
    pub russia: bool,
    pub industry: Industry,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObservationError {
    #[error("russia = 1 requires developed = 0")]
    RussiaMarkedDeveloped,
    #[error("{column} holds a {found} grade")]
    WrongAgency { column: &'static str, found: Agency },
}

impl Observation {
    pub fn new(company_id: impl Into<String>, as_of: Date, industry: Industry) -> Self {
        Observation {
            company_id: company_id.into(),
            as_of,
            sp_rating: None,
            moodys_rating: None,
            financials: Financials::default(),
            beta: None,
            volatility: None,
            macros: MacroCovariates::default(),
            developed: false,
            russia: false,
            industry,
        }
    }

    pub fn validate(&self) -> Result<(), ObservationError> {
        if self.russia && self.developed {
            return Err(ObservationError::RussiaMarkedDeveloped);
        }
        if let Some(g) = self.sp_rating.filter(|g| g.agency() != Agency::SP) {
            return Err(ObservationError::WrongAgency { column: "sp_rating", found: g.agency() });
        }
        if let Some(g) = self.moodys_rating.filter(|g| g.agency() != Agency::Moodys) {
            return Err(ObservationError::WrongAgency { column: "moodys_rating", found: g.agency() });
        }
        Ok(())
    }

    pub fn rating(&self, agency: Agency) -> Option<RatingGrade> {
        match agency {
            Agency::SP => self.sp_rating,
            Agency::Moodys => self.moodys_rating,
        }
    }

    /// Fill missing beta and volatility from a company return series.
    pub fn fill_market_measures(&mut self, series: &ReturnSeries, volatility_exponent: f64) -> Result<(), MarketError> {
        if self.beta.is_none() {
            self.beta = Some(compute_beta(&series.equity, &series.market)?);
        }
        if self.volatility.is_none() {
            self.volatility = Some(compute_volatility(&series.equity, volatility_exponent)?);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indicator {
    MarketCap,
    PriceEarnings,
    Roa,
    OperatingMargin,
    DebtEbitda,
    CashFlowSales,
    DebtAssets,
    LtDebtCapital,
    EbitdaInterest,
    Liquidity,
    FixedAssetsShare,
    PriceCashFlow,
    Beta,
    Volatility,
}

impl Indicator {
    pub const ALL: [Indicator; 14] = [
        Indicator::MarketCap,
        Indicator::PriceEarnings,
        Indicator::Roa,
        Indicator::OperatingMargin,
        Indicator::DebtEbitda,
        Indicator::CashFlowSales,
        Indicator::DebtAssets,
        Indicator::LtDebtCapital,
        Indicator::EbitdaInterest,
        Indicator::Liquidity,
        Indicator::FixedAssetsShare,
        Indicator::PriceCashFlow,
        Indicator::Beta,
        Indicator::Volatility,
    ];

    /// Identifier used in model specs and reports.
    pub fn name(self) -> &'static str {
        match self {
            Indicator::MarketCap => "mkt_cap",
            Indicator::PriceEarnings => "pe",
            Indicator::Roa => "roa",
            Indicator::OperatingMargin => "operating_margin",
            Indicator::DebtEbitda => "debt_ebitda",
            Indicator::CashFlowSales => "cash_flow_sales",
            Indicator::DebtAssets => "debt_assets",
            Indicator::LtDebtCapital => "lt_debt_capital",
            Indicator::EbitdaInterest => "ebitda_interest",
            Indicator::Liquidity => "liquidity",
            Indicator::FixedAssetsShare => "fixed_assets_share",
            Indicator::PriceCashFlow => "price_cash_flow",
            Indicator::Beta => "beta",
            Indicator::Volatility => "volatility",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("missing field {0}")]
    MissingField(&'static str),
    #[error("zero denominator for {}", .0.name())]
    DivisionByZero(Indicator),
}

/// All fourteen indicators of one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorVector([f64; 14]);

impl IndicatorVector {
    pub fn get(&self, indicator: Indicator) -> f64 {
        self.0[indicator.index()]
    }
}

fn field(obs: &Observation, f: RawField) -> Result<f64, DeriveError> {
    obs.financials.get(f).ok_or(DeriveError::MissingField(f.column()))
}

fn ratio(obs: &Observation, num: RawField, den: RawField, which: Indicator, scale: f64) -> Result<f64, DeriveError> {
    let n = field(obs, num)?;
    let d = field(obs, den)?;
    if d == 0.0 {
        return Err(DeriveError::DivisionByZero(which));
    }
    Ok(scale * n / d)
}

/// One indicator by its defining formula.
pub fn derive_indicator(obs: &Observation, indicator: Indicator) -> Result<f64, DeriveError> {
    use Indicator as I;
    use RawField as F;
    match indicator {
        I::MarketCap => field(obs, F::MktCapMusd),
        I::PriceEarnings => ratio(obs, F::Price, F::Eps, indicator, 1.0),
        I::Roa => ratio(obs, F::NetEarnings, F::AvgAssets, indicator, 100.0),
        I::OperatingMargin => ratio(obs, F::OperatingRevenue, F::Receipts, indicator, 100.0),
        I::DebtEbitda => ratio(obs, F::Debt, F::Ebitda, indicator, 1.0),
        I::CashFlowSales => ratio(obs, F::CashFlow, F::Receipts, indicator, 100.0),
        I::DebtAssets => ratio(obs, F::Debt, F::TotalAssets, indicator, 1.0),
        I::LtDebtCapital => ratio(obs, F::LtDebt, F::TotalCapital, indicator, 100.0),
        I::EbitdaInterest => ratio(obs, F::Ebitda, F::InterestExpense, indicator, 1.0),
        I::Liquidity => ratio(obs, F::StAssets, F::StLiabilities, indicator, 1.0),
        I::FixedAssetsShare => ratio(obs, F::FixedAssets, F::TotalAssets, indicator, 1.0),
        I::PriceCashFlow => ratio(obs, F::MktCapMusd, F::CashFlow, indicator, 1.0),
        I::Beta => obs.beta.ok_or(DeriveError::MissingField("beta")),
        I::Volatility => obs.volatility.ok_or(DeriveError::MissingField("volatility")),
    }
}

/// All indicators; fails on the first one that cannot be formed.
pub fn derive_indicators(obs: &Observation) -> Result<IndicatorVector, DeriveError> {
    let mut out = [0.0; 14];
    for ind in Indicator::ALL {
        out[ind.index()] = derive_indicator(obs, ind)?;
    }
    Ok(IndicatorVector(out))
}

/// Paired equity and market-index returns for one company.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReturnSeries {
    pub equity: Vec<f64>,
    pub market: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("return series lengths differ or are shorter than 2 ({equity} vs {market})")]
    LengthMismatch { equity: usize, market: usize },
    #[error("market return variance is zero")]
    ZeroMarketVariance,
}

fn mean(xs: &[f64]) -> f64 {
    crate::math::ordered_sum(xs.iter().copied()) / xs.len() as f64
}

fn sample_cov(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    crate::math::ordered_sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb))) / (a.len() - 1) as f64
}

/// `Cov(R_i, R_m) / Var(R_m)` with n-1 normalisation on both.
pub fn compute_beta(equity: &[f64], market: &[f64]) -> Result<f64, MarketError> {
    if equity.len() != market.len() || equity.len() < 2 {
        return Err(MarketError::LengthMismatch { equity: equity.len(), market: market.len() });
    }
    let var_m = sample_cov(market, market);
    if var_m <= 0.0 {
        return Err(MarketError::ZeroMarketVariance);
    }
    Ok(sample_cov(equity, market) / var_m)
}

pub const DEFAULT_VOLATILITY_EXPONENT: f64 = 0.5;

/// `Var(R_i)^exponent`; the default exponent 0.5 gives the standard deviation.
pub fn compute_volatility(equity: &[f64], exponent: f64) -> Result<f64, MarketError> {
    if equity.len() < 2 {
        return Err(MarketError::LengthMismatch { equity: equity.len(), market: equity.len() });
    }
    let var = sample_cov(equity, equity).max(0.0);
    Ok(if exponent == 0.5 { sqrt(var) } else { powf(var, exponent) })
}

/// Ratings observed at one date, to be matched with earlier financials.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRecord {
    pub company_id: String,
    pub as_of: Date,
    pub sp_rating: Option<RatingGrade>,
    pub moodys_rating: Option<RatingGrade>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagJoin {
    /// Financial observations carrying the ratings they were matched to.
    pub joined: Vec<Observation>,
    /// `(rating index, financial index)` for every joined row.
    pub matches: Vec<(usize, usize)>,
    /// Ratings without any financial snapshot at least `lag` months older.
    pub unmatched: Vec<usize>,
}

pub const DEFAULT_LAG_MONTHS: u32 = 18;

/// Join each rating to the latest financial snapshot of the same company
/// dated at least `lag_months` calendar months earlier.
pub fn align_lag(financials: &[Observation], ratings: &[RatingRecord], lag_months: u32) -> LagJoin {
    let mut out = LagJoin { joined: Vec::new(), matches: Vec::new(), unmatched: Vec::new() };
    for (ri, rating) in ratings.iter().enumerate() {
        let best = financials
            .iter()
            .enumerate()
            .filter(|(_, f)| f.company_id == rating.company_id)
            .filter(|(_, f)| rating.as_of.months_since(f.as_of) >= lag_months as i64)
            .fold(None::<(usize, &Observation)>, |acc, (fi, f)| match acc {
                Some((_, b)) if b.as_of.month_index() > f.as_of.month_index() => acc,
                _ => Some((fi, f)),
            });
        match best {
            Some((fi, f)) => {
                let mut obs = f.clone();
                obs.sp_rating = rating.sp_rating;
                obs.moodys_rating = rating.moodys_rating;
                out.joined.push(obs);
                out.matches.push((ri, fi));
            }
            None => out.unmatched.push(ri),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn obs() -> Observation {
        Observation::new("X", "2007-09-30".parse().unwrap(), Industry::Utilities)
    }

    #[test]
    fn ratio_examples() {
        let mut o = obs();
        o.financials = Financials::default()
            .with(RawField::Debt, 50.0)
            .with(RawField::TotalAssets, 200.0)
            .with(RawField::StAssets, 7.5)
            .with(RawField::StLiabilities, 7.5)
            .with(RawField::NetEarnings, 8.0)
            .with(RawField::AvgAssets, 100.0);
        assert_eq!(derive_indicator(&o, Indicator::DebtAssets).unwrap(), 0.25);
        assert_eq!(derive_indicator(&o, Indicator::Liquidity).unwrap(), 1.0);
        assert_eq!(derive_indicator(&o, Indicator::Roa).unwrap(), 8.0);
        assert_eq!(derive_indicator(&o, Indicator::DebtEbitda), Err(DeriveError::MissingField("ebitda")));
        o.financials.set(RawField::TotalAssets, Some(0.0));
        assert_eq!(
            derive_indicator(&o, Indicator::DebtAssets),
            Err(DeriveError::DivisionByZero(Indicator::DebtAssets))
        );
        assert!(derive_indicators(&o).is_err());
    }

    #[test]
    fn beta_examples() {
        let rm = [0.01, -0.03, 0.02, 0.05, -0.01];
        assert!((compute_beta(&rm, &rm).unwrap() - 1.0).abs() < 1e-15);
        let doubled: Vec<f64> = rm.iter().map(|r| 2.0 * r).collect();
        assert!((compute_beta(&doubled, &rm).unwrap() - 2.0).abs() < 1e-15);

        // Hand sums: mean r_i = 0.02/3, mean r_m = 0.01.
        // cov numerator = (0.01-0.02/3)(0.01) + (-0.02-0.02/3)(-0.01) + (0.03-0.02/3)(0)
        //               = 0.0001/3 + 0.0008/3 = 0.0003
        // var numerator = 0.0001 + 0.0001 + 0 = 0.0002 -> beta = 1.5
        let beta = compute_beta(&[0.01, -0.02, 0.03], &[0.02, 0.00, 0.01]).unwrap();
        assert!((beta - 1.5).abs() < 1e-12, "{beta}");

        assert_eq!(compute_beta(&[1.0, 2.0], &[1.0]), Err(MarketError::LengthMismatch { equity: 2, market: 1 }));
        assert_eq!(compute_beta(&[1.0, 2.0], &[3.0, 3.0]), Err(MarketError::ZeroMarketVariance));
    }

    #[test]
    fn volatility_examples() {
        assert_eq!(compute_volatility(&[0.3, 0.3, 0.3], 0.5).unwrap(), 0.0);
        // Var([-1, 1]) with n-1 = 2; Var([0, sqrt 2]) = 1.
        let unit = [0.0, core::f64::consts::SQRT_2];
        assert!((compute_volatility(&unit, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((compute_volatility(&unit, 0.4).unwrap() - 1.0).abs() < 1e-15);
        // Var = 0.04 for [0, 0.2 * sqrt 2].
        let s = [0.0, 0.2 * core::f64::consts::SQRT_2];
        assert!((compute_volatility(&s, 0.5).unwrap() - 0.2).abs() < 1e-15);
        assert!(compute_volatility(&[0.1], 0.5).is_err());
    }

    fn fin(id: &str, date: &str) -> Observation {
        Observation::new(id, date.parse().unwrap(), Industry::Consumer)
    }

    fn rating(id: &str, date: &str) -> RatingRecord {
        RatingRecord {
            company_id: id.into(),
            as_of: date.parse().unwrap(),
            sp_rating: Some(RatingGrade::parse(Agency::SP, "BB").unwrap()),
            moodys_rating: None,
        }
    }

    #[test]
    fn lag_examples() {
        let r = [rating("A", "2009-02-15")];
        let j = align_lag(&[fin("A", "2007-09-30")], &r, 18);
        assert!(j.joined.is_empty());
        assert_eq!(j.unmatched, vec![0]);

        let j = align_lag(&[fin("A", "2007-08-31")], &r, 18);
        assert_eq!(j.matches, vec![(0, 0)]);
        assert_eq!(j.joined[0].sp_rating.unwrap().symbol(), "BB");

        let fs = [fin("A", "2006-01-31"), fin("A", "2007-06-30"), fin("B", "2007-07-31")];
        let j = align_lag(&fs, &r, 18);
        assert_eq!(j.matches, vec![(0, 1)]);
    }

    #[test]
    fn dates_parse_strictly() {
        assert!("2009-02-29".parse::<Date>().is_err());
        assert!("2008-02-29".parse::<Date>().is_ok());
        assert!("2008-2-01".parse::<Date>().is_err());
        assert_eq!(alloc::format!("{}", "2008-02-09".parse::<Date>().unwrap()), "2008-02-09");
    }

    #[test]
    fn russia_cannot_be_developed() {
        let mut o = obs();
        o.russia = true;
        o.developed = true;
        assert_eq!(o.validate(), Err(ObservationError::RussiaMarkedDeveloped));
    }
}
