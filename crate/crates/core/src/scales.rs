//! Agency letter grades and their numeric encodings.
//!
//! Every scale numbers buckets from 1 (best) upward. Moody's grades are
//! translated notch by notch to their S&P equivalents before encoding, so
//! the three bucket tables below are written against the S&P ladder only.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaleError {
    #[error("unknown {agency} grade {symbol:?}")]
    UnknownGrade { agency: Agency, symbol: alloc::string::String },
    #[error("code {code} outside 1..={max} for scale {kind}")]
    CodeOutOfRange { code: u32, kind: ScaleKind, max: u32 },
    #[error("unknown scale {0:?} (expected classes8, gradations18 or mixed12)")]
    UnknownScale(alloc::string::String),
    #[error("unknown agency {0:?} (expected sp or moodys)")]
    UnknownAgency(alloc::string::String),
}

/// S&P long-term issuer ladder, best first.
pub const SP_LADDER: [&str; 22] = [
    "AAA", "AA+", "AA", "AA-", "A+", "A", "A-", "BBB+", "BBB", "BBB-", "BB+", "BB", "BB-", "B+", "B", "B-", "CCC+",
    "CCC", "CCC-", "CC", "C", "D",
];

/// Moody's long-term ladder, best first. Entry `i` is equivalent to
/// `SP_LADDER[i]`; Moody's has no separate default grade.
pub const MOODYS_LADDER: [&str; 21] = [
    "Aaa", "Aa1", "Aa2", "Aa3", "A1", "A2", "A3", "Baa1", "Baa2", "Baa3", "Ba1", "Ba2", "Ba3", "B1", "B2", "B3",
    "Caa1", "Caa2", "Caa3", "Ca", "C",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agency {
    SP,
    Moodys,
}

impl Agency {
    pub fn name(self) -> &'static str {
        match self {
            Agency::SP => "sp",
            Agency::Moodys => "moodys",
        }
    }

    pub fn ladder(self) -> &'static [&'static str] {
        match self {
            Agency::SP => &SP_LADDER,
            Agency::Moodys => &MOODYS_LADDER,
        }
    }
}

impl fmt::Display for Agency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Agency {
    type Err = ScaleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sp" => Ok(Agency::SP),
            "moodys" => Ok(Agency::Moodys),
            other => Err(ScaleError::UnknownAgency(other.into())),
        }
    }
}

/// A canonical grade of one agency, stored as its notch on that agency's
/// ladder (0 = best).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RatingGrade {
    agency: Agency,
    notch: u8,
}

impl RatingGrade {
    pub fn parse(agency: Agency, symbol: &str) -> Result<Self, ScaleError> {
        agency
            .ladder()
            .iter()
            .position(|s| *s == symbol)
            .map(|notch| RatingGrade { agency, notch: notch as u8 })
            .ok_or_else(|| ScaleError::UnknownGrade { agency, symbol: symbol.into() })
    }

    /// Grade at `notch` on the agency ladder, if the notch exists.
    pub fn from_notch(agency: Agency, notch: usize) -> Option<Self> {
        (notch < agency.ladder().len()).then_some(RatingGrade { agency, notch: notch as u8 })
    }

    pub fn agency(self) -> Agency {
        self.agency
    }

    pub fn notch(self) -> usize {
        self.notch as usize
    }

    pub fn symbol(self) -> &'static str {
        self.agency.ladder()[self.notch as usize]
    }

    /// The S&P grade occupying the same notch.
    pub fn to_sp(self) -> RatingGrade {
        RatingGrade { agency: Agency::SP, notch: self.notch }
    }

    /// The Moody's grade occupying the same notch. S&P `D` has no Moody's
    /// counterpart and maps to the bottom grade `C`.
    pub fn to_moodys(self) -> RatingGrade {
        let notch = self.notch.min(MOODYS_LADDER.len() as u8 - 1);
        RatingGrade { agency: Agency::Moodys, notch }
    }
}

impl fmt::Display for RatingGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Rank-preserving translation of a Moody's symbol to the S&P ladder.
pub fn crossmap_moodys_to_sp(symbol: &str) -> Result<&'static str, ScaleError> {
    Ok(RatingGrade::parse(Agency::Moodys, symbol)?.to_sp().symbol())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScaleKind {
    Classes8,
    Gradations18,
    Mixed12,
}

// Code of each S&P notch, indexed like SP_LADDER.
const CLASSES8: [u32; 22] = [1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5, 5, 5, 6, 6, 6, 7, 7, 7, 8, 8, 8];
const GRADATIONS18: [u32; 22] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 18, 18, 18, 18];
const MIXED12: [u32; 22] = [1, 2, 2, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 12, 12, 12, 12, 12, 12, 12, 12];

const CLASSES8_LABELS: [&str; 8] = ["AAA", "AA", "A", "BBB", "BB", "B", "CCC", "CC-and-below"];
const GRADATIONS18_LABELS: [&str; 18] = [
    "AAA",
    "AA+",
    "AA",
    "AA-",
    "A+",
    "A",
    "A-",
    "BBB+",
    "BBB",
    "BBB-",
    "BB+",
    "BB",
    "BB-",
    "B+",
    "B",
    "B-",
    "CCC+",
    "CCC-and-below",
];
const MIXED12_LABELS: [&str; 12] =
    ["AAA", "AA", "A+", "A", "A-", "BBB+", "BBB", "BBB-", "BB+", "BB", "BB-", "B-and-below"];

impl ScaleKind {
    pub const ALL: [ScaleKind; 3] = [ScaleKind::Classes8, ScaleKind::Gradations18, ScaleKind::Mixed12];

    pub fn n_codes(self) -> u32 {
        match self {
            ScaleKind::Classes8 => 8,
            ScaleKind::Gradations18 => 18,
            ScaleKind::Mixed12 => 12,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScaleKind::Classes8 => "classes8",
            ScaleKind::Gradations18 => "gradations18",
            ScaleKind::Mixed12 => "mixed12",
        }
    }

    fn table(self) -> &'static [u32; 22] {
        match self {
            ScaleKind::Classes8 => &CLASSES8,
            ScaleKind::Gradations18 => &GRADATIONS18,
            ScaleKind::Mixed12 => &MIXED12,
        }
    }

    fn labels(self) -> &'static [&'static str] {
        match self {
            ScaleKind::Classes8 => &CLASSES8_LABELS,
            ScaleKind::Gradations18 => &GRADATIONS18_LABELS,
            ScaleKind::Mixed12 => &MIXED12_LABELS,
        }
    }

    /// Code of an S&P ladder notch.
    pub fn code_of_notch(self, sp_notch: usize) -> u32 {
        self.table()[sp_notch]
    }

    pub fn map(self) -> ScaleMap {
        let table = self.table();
        let buckets = (1..=self.n_codes())
            .map(|code| Bucket {
                code,
                label: self.labels()[code as usize - 1],
                members: SP_LADDER.iter().zip(table.iter()).filter(|(_, c)| **c == code).map(|(s, _)| *s).collect(),
            })
            .collect();
        ScaleMap { kind: self, buckets }
    }
}

impl fmt::Display for ScaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScaleKind {
    type Err = ScaleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classes8" => Ok(ScaleKind::Classes8),
            "gradations18" => Ok(ScaleKind::Gradations18),
            "mixed12" => Ok(ScaleKind::Mixed12),
            other => Err(ScaleError::UnknownScale(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket {
    pub code: u32,
    /// Representative symbol: the grade itself for single-grade buckets, the
    /// unmodified letter for a whole letter class, `X-and-below` for the
    /// open bottom bucket.
    pub label: &'static str,
    /// S&P grades in ladder order.
    pub members: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleMap {
    pub kind: ScaleKind,
    pub buckets: Vec<Bucket>,
}

/// Bucket code containing `grade`; Moody's grades are cross-mapped first.
pub fn encode(grade: RatingGrade, kind: ScaleKind) -> u32 {
    kind.code_of_notch(grade.to_sp().notch())
}

/// Encode a symbol given as text: a canonical grade of `agency`, or one of
/// the bucket labels of `kind` (so that `encode_symbol(decode(k))` is `k`).
pub fn encode_symbol(agency: Agency, symbol: &str, kind: ScaleKind) -> Result<u32, ScaleError> {
    match RatingGrade::parse(agency, symbol) {
        Ok(grade) => Ok(encode(grade, kind)),
        Err(err) => kind.labels().iter().position(|l| *l == symbol).map(|i| i as u32 + 1).ok_or(err),
    }
}

/// Representative label of bucket `code`.
pub fn decode(code: u32, kind: ScaleKind) -> Result<&'static str, ScaleError> {
    check_code(code, kind)?;
    Ok(kind.labels()[code as usize - 1])
}

/// Best S&P grade inside bucket `code`; always a canonical grade, unlike
/// [`decode`], which may return an `X-and-below` label.
pub fn representative_grade(code: u32, kind: ScaleKind) -> Result<RatingGrade, ScaleError> {
    check_code(code, kind)?;
    let notch = kind.table().iter().position(|c| *c == code).expect("every code has a member");
    Ok(RatingGrade { agency: Agency::SP, notch: notch as u8 })
}

fn check_code(code: u32, kind: ScaleKind) -> Result<(), ScaleError> {
    if code == 0 || code > kind.n_codes() {
        return Err(ScaleError::CodeOutOfRange { code, kind, max: kind.n_codes() });
    }
    Ok(())
}
