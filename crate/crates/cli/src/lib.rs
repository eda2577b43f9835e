//! `gecstrat` command-line surface.
//!
//! Subcommands: `stats` (corpus descriptors), `evaluate` (span-based scoring
//! against M2 references), `correct` (zero-/few-shot correction runs through
//! a completion endpoint, mock, or replay transcript), and `report`
//! (stratum-by-stratum comparison of two report JSON files).
//!
//! Exit codes: 0 on success, 1 for evaluation-level errors (malformed or
//! mismatched input content), 2 for I/O and configuration errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod table;

#[derive(Parser)]
#[command(name = "gecstrat", version, about = "Proficiency-stratified GEC evaluation and prompting toolkit")]
pub struct Cli {
    /// TOML config file; defaults to $GECSTRAT_CONFIG when set.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Error-type distributions and tokens-per-sentence over M2 corpora
    Stats(commands::stats::StatsArgs),
    /// Score hypothesis corrections against reference M2 annotations
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Run a corrector over a corpus, persist the run, optionally evaluate
    Correct(commands::correct::CorrectArgs),
    /// Compare two report JSON files stratum by stratum
    Report(commands::report::ReportArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Flag/config-file problems; exit code 2.
    #[error("{0}")]
    Config(String),
    /// Filesystem problems; exit code 2.
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Input-content problems (malformed or mismatched data); exit code 1.
    #[error("{0}")]
    Eval(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Eval(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Stats(args) => commands::stats::run(&args, &config),
        Command::Evaluate(args) => commands::evaluate::run(&args, &config),
        Command::Correct(args) => commands::correct::run(&args, &config),
        Command::Report(args) => commands::report::run(&args, &config),
    }
}

/// Writes to `--out` when given, stdout otherwise.
pub(crate) fn emit(out: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::io(path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
