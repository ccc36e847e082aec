//! Command-line front end for record-value maximum-likelihood experiments.
//!
//! Commands: `extract-records`, `estimate`, `mse-curve` and `verify`. Exit
//! codes are 0 on success, 1 when a verification check fails, 2 for usage
//! or input errors and 3 when estimation itself fails.

pub mod commands;
pub mod config;
pub mod curve;
pub mod error;
pub mod io;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use record_mle_core::montecarlo::DEFAULT_SEED;

use config::{Estimand, Format, SizeRange};

#[derive(Debug, Parser)]
#[command(name = "record-mle", version, about = "Maximum-likelihood estimation from samples and lower records")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the lower records of one CSV column.
    ExtractRecords(ExtractArgs),
    /// Estimate theta from a sample (`value`) or records (`time,value`) file.
    Estimate(EstimateArgs),
    /// Analytic and simulated MSE over a range of sizes.
    MseCurve(CurveArgs),
    /// Run the built-in checks and report pass/fail for each.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_parser = ["power", "gumbel", "frechet"])]
    pub family: String,
    /// Fréchet shape.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "value")]
    pub column: String,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub input: PathBuf,
    /// Points at which to report the plug-in PDF and CDF.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Vec<f64>,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// theta, exp-theta, pdf@X or cdf@X.
    #[arg(long, default_value = "theta")]
    pub estimand: Estimand,
    /// Sizes: `a..b`, `a..b:step` or `a,b,c`.
    #[arg(long = "n", visible_alias = "m", default_value = "3..30")]
    pub sizes: SizeRange,
    /// Replications per size and source; 0 skips simulation.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, env = "RECORD_MLE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for simulation (0 = all cores). Never changes results.
    #[arg(long, default_value_t = 0)]
    pub lanes: usize,
    /// Base path; each format gets its own extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
    #[arg(long)]
    pub log_scale: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = section_names())]
    pub section: String,
    #[arg(long, env = "RECORD_MLE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub lanes: usize,
    /// Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn section_names() -> clap::builder::PossibleValuesParser {
    let mut names = vec!["all"];
    names.extend(verify::SECTIONS);
    clap::builder::PossibleValuesParser::new(names)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
