//! Library side of the `hs` binary: argument handling, data files and the
//! four subcommands.

pub mod bench;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{ChainSettings, Family};
pub use crate::error::{CliError, CliResult, ErrorKind};
use crate::io::DrawsFormat;

#[derive(Debug, Parser)]
#[command(name = "hs", version, about = "Horseshoe regression samplers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a posterior and write draws, diagnostics and run metadata
    Run(RunArgs),
    /// Time the linear sampler over an (n, p) grid
    Bench(BenchArgs),
    /// Effective sample size of stored draws at several thinning levels
    Ess(EssArgs),
    /// Marginal likelihood of the linear horseshoe model
    Evidence(EvidenceArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[command(flatten)]
    pub chain: ChainSettings,
    /// JSON file of defaults for any of the settings above
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Draws file format: csv or binary
    #[arg(long, value_parser = config::parse_format)]
    pub format: Option<DrawsFormat>,
    /// Report coefficients on the scale of the input predictors
    #[arg(long)]
    pub destandardize: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Retained draws timed per cell
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cells estimated to need more memory are reported as failed
    #[arg(long = "mem-limit-mb", default_value_t = 4096)]
    pub mem_limit_mb: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EssArgs {
    #[arg(long)]
    pub draws: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    pub thin: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EvidenceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub chain: ChainSettings,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Outcome of parsing: either a command to run or text clap wants printed
/// (help, version) with a successful exit.
pub enum Parsed {
    Command(Cli),
    Print(String),
}

pub fn parse_args<I, T>(args: I) -> CliResult<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(Parsed::Command(cli)),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Ok(Parsed::Print(e.to_string()))
            }
            clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                Err(CliError::usage("a subcommand is required: run, bench, ess or evidence"))
            }
            _ => Err(CliError::usage(first_line(&e.to_string()))),
        },
    }
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or("").trim_start_matches("error: ")
}

/// Parse and execute; progress lines go to `log`.
pub fn run<I, T>(args: I, log: &mut dyn std::io::Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args)? {
        Parsed::Print(text) => {
            print!("{text}");
            Ok(())
        }
        Parsed::Command(cli) => match cli.command {
            Command::Run(a) => commands::run(&a, log),
            Command::Bench(a) => commands::bench(&a, log),
            Command::Ess(a) => commands::ess(&a, log),
            Command::Evidence(a) => commands::evidence(&a, log),
        },
    }
}
