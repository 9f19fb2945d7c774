//! File formats and the `ratingprobit` command line.
//!
//! `run` parses arguments, dispatches to one subcommand and maps failures to
//! exit codes: 0 success, 2 bad input, 3 the likelihood maximisation
//! failed, 4 anything else.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use ratingprobit_core::compare::DeltaSign;
use ratingprobit_core::data::{DEFAULT_LAG_MONTHS, DEFAULT_VOLATILITY_EXPONENT};
use ratingprobit_core::scales::{Agency, ScaleKind};

pub mod artifact;
mod commands;
pub mod dataset;

pub use commands::CliError;

fn scale_parser() -> impl TypedValueParser<Value = ScaleKind> {
    PossibleValuesParser::new(ScaleKind::ALL.map(|s| s.name())).map(|s| s.parse::<ScaleKind>().expect("listed value"))
}

fn agency_parser() -> impl TypedValueParser<Value = Agency> {
    PossibleValuesParser::new(["sp", "moodys"]).map(|s| s.parse::<Agency>().expect("listed value"))
}

fn sign_parser() -> impl TypedValueParser<Value = DeltaSign> {
    PossibleValuesParser::new(["sp-minus-moodys", "moodys-minus-sp"])
        .map(|s| s.parse::<DeltaSign>().expect("listed value"))
}

#[derive(Debug, Parser)]
#[command(name = "ratingprobit", version, about = "Ordered-probit credit rating models")]
struct Cli {
    /// More diagnostics on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only report errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the rating scales as CSV.
    Scales(ScalesArgs),
    /// Descriptive statistics of the summary indicators as JSON.
    Stats(StatsArgs),
    /// Generate a synthetic rated dataset.
    Synth(SynthArgs),
    /// Fit an ordered probit to one agency's ratings.
    Fit(FitArgs),
    /// Predict rating codes and class probabilities with a fitted model.
    Predict(PredictArgs),
    /// Compare a model's predictions with observed ratings.
    Eval(EvalArgs),
    /// Measure and model disagreement between the two agencies.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub(crate) struct InputArgs {
    /// Dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Rating CSV (company_id,as_of,sp_rating,moodys_rating) joined to the
    /// dataset's financials with a lag; replaces the dataset's own ratings.
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Minimum months between financials and the rating they explain.
    #[arg(long, default_value_t = DEFAULT_LAG_MONTHS)]
    lag_months: u32,
    /// Directory of `<company_id>.csv` return series (date,r_i,r_m) used to
    /// fill missing beta and volatility.
    #[arg(long)]
    returns: Option<PathBuf>,
    /// Exponent applied to the return variance to obtain volatility.
    #[arg(long, default_value_t = DEFAULT_VOLATILITY_EXPONENT)]
    vol_exponent: f64,
    /// Rejected rows tolerated before the load fails.
    #[arg(long, default_value_t = dataset::DEFAULT_MAX_ROW_ERRORS)]
    max_row_errors: usize,
}

#[derive(Debug, Args)]
pub(crate) struct ScalesArgs {
    /// Only this scale.
    #[arg(long, value_parser = scale_parser())]
    scale: Option<ScaleKind>,
    /// Output CSV (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output JSON (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct SynthArgs {
    /// Number of issuers.
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Output dataset CSV.
    #[arg(long)]
    out: PathBuf,
    /// Sidecar JSON with the generator settings and true models (default:
    /// the output path with a `.json` extension).
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Spec file or preset name.
    #[arg(long)]
    spec: String,
    #[arg(long, value_parser = scale_parser(), default_value = "classes8")]
    scale: ScaleKind,
    #[arg(long, value_parser = agency_parser(), default_value = "sp")]
    agency: Agency,
    /// Output model JSON (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct PredictArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Model JSON written by `fit`.
    #[arg(long)]
    model: PathBuf,
    /// Output CSV (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    model: PathBuf,
    /// Expected scale; an error if the model was fitted on another.
    #[arg(long, value_parser = scale_parser())]
    scale: Option<ScaleKind>,
    /// Agency whose ratings are the truth (default: the model's).
    #[arg(long, value_parser = agency_parser())]
    agency: Option<Agency>,
    /// Output report JSON (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output histogram CSV (delta,count).
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = scale_parser(), default_value = "gradations18")]
    scale: ScaleKind,
    /// Spec file or preset name for the disagreement models.
    #[arg(long, default_value = "split_1s")]
    spec: String,
    #[arg(long, value_parser = sign_parser(), default_value = "sp-minus-moodys")]
    delta_sign: DeltaSign,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    // Repeated runs in one process (tests) keep the first logger.
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_logging(cli.verbose, cli.quiet);
    let dispatch = move || match cli.command {
        Command::Scales(a) => commands::scales(a),
        Command::Stats(a) => commands::stats(a),
        Command::Synth(a) => commands::synth(a),
        Command::Fit(a) => commands::fit(a),
        Command::Predict(a) => commands::predict(a),
        Command::Eval(a) => commands::eval(a),
        Command::Compare(a) => commands::compare(a),
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(dispatch))
        .unwrap_or_else(|_| Err(CliError::Internal("internal error (panic)".into())));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
