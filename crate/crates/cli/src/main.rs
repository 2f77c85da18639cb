//! `overround`: odds, overround and imputed-margin reports from fixture files.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "overround",
    version,
    about = "Bookmaker overround and margin analysis"
)]
struct Cli {
    /// write a JSON run manifest to this path after a successful run
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Implied probabilities and their sums per match and bookmaker
    Overround(OverroundArgs),
    /// Solve the additive margin per match for one or more bookmakers
    Impute(ImputeArgs),
    /// Rank bookmakers on a single match by overround
    Compare(CompareArgs),
    /// Mean, median, max, min and sd of the solved margins per bookmaker
    Summarize(ImputeArgs),
    /// Histogram of the solved margins per bookmaker
    Hist(HistArgs),
    /// Monte Carlo replay of a two-outcome scheme
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    #[default]
    Text,
}

#[derive(Debug, Args)]
struct Output {
    /// output path (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv keeps full precision, text rounds to two places
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct OverroundArgs {
    #[arg(long)]
    input: PathBuf,
    /// bookmaker to include; repeat for several, omit for all
    #[arg(long = "house")]
    houses: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ImputeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "house")]
    houses: Vec<String>,
    /// residual tolerance of the root finder
    #[arg(long, default_value = "1e-10", value_parser = parse_real)]
    tol: f64,
    /// round implied probabilities and their sum to two places before solving
    #[arg(long)]
    paper_rounding: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    /// 1-based data row of the match
    #[arg(long, conflicts_with_all = ["date", "home", "away"])]
    row: Option<usize>,
    /// match date, DD/MM/YY or DD/MM/YYYY
    #[arg(long, requires_all = ["home", "away"])]
    date: Option<String>,
    #[arg(long, requires = "date")]
    home: Option<String>,
    #[arg(long, requires = "date")]
    away: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct HistArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "house")]
    houses: Vec<String>,
    /// bin width
    #[arg(long, default_value = "0.01", value_parser = parse_real)]
    bins: f64,
    #[arg(long, default_value = "1e-10", value_parser = parse_real)]
    tol: f64,
    #[arg(long)]
    paper_rounding: bool,
    /// also write an SVG bar chart here
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// probability of the event the house pays on
    #[arg(long, value_parser = parse_real)]
    p: f64,
    /// amount withheld from the fair payout
    #[arg(long, value_parser = parse_real, conflicts_with = "payout", required_unless_present = "payout")]
    epsilon: Option<f64>,
    /// amount the house pays when the event happens
    #[arg(long, value_parser = parse_real)]
    payout: Option<f64>,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

/// Accepts integers written as `1000000` or `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.trim().parse::<u64>() {
        return Ok(n);
    }
    let v = parse_real(s)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("{s:?} is not a non-negative whole number"))
    }
}

/// Why a command failed, and so which exit code it gets.
#[derive(Debug)]
pub enum Failure {
    Data(anyhow::Error),
    Usage(anyhow::Error),
}

impl Failure {
    pub fn data(msg: impl std::fmt::Display) -> Self {
        Failure::Data(anyhow::anyhow!("{msg}"))
    }

    pub fn usage(msg: impl std::fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut manifest = RunManifest::start(&cli.command);
    let outputs = match &cli.command {
        Command::Overround(a) => commands::overround(a)?,
        Command::Impute(a) => commands::impute(a)?,
        Command::Compare(a) => commands::compare(a)?,
        Command::Summarize(a) => commands::summarize(a)?,
        Command::Hist(a) => commands::hist(a)?,
        Command::Simulate(a) => commands::simulate(a)?,
    };
    if let Some(path) = &cli.manifest {
        manifest.outputs = outputs;
        manifest.write(path).map_err(Failure::Data)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
