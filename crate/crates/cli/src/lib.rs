//! Command-line front end: `validate`, `score`, `aggregate` and `agree`.
//!
//! Exit codes are part of the contract: 0 on success, 1 on a domain failure
//! (invalid data, nothing to score, degenerate statistics), 2 on I/O or usage
//! failures.

pub mod aggregate;
pub mod agree;
pub mod score;
pub mod settings;
pub mod validate;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use settings::RunMeta;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn domain(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 1,
            error: error.into(),
        }
    }

    pub fn io(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Maps engine errors onto the exit-code classes.
impl From<rbench_core::Error> for CliError {
    fn from(e: rbench_core::Error) -> Self {
        match e {
            rbench_core::Error::Io(_) => CliError::io(e),
            other => CliError::domain(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rbench", version, about = "Score, aggregate and audit robotic video generation benchmarks")]
pub struct Cli {
    /// Config override `key=value` (repeatable). Applied after $RBENCH_CONFIG.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a manifest for duplicate ids, missing images and split counts.
    Validate(ValidateArgs),
    /// Compute per-video scores from extracted signals and judge records.
    Score(ScoreArgs),
    /// Build the ranked leaderboard from a results file.
    Aggregate(AggregateArgs),
    /// Compare benchmark scores with human preference scores.
    Agree(AgreeArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub signals_dir: PathBuf,
    #[arg(long)]
    pub vqa_dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; output bytes do not depend on this.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    /// Also write the skip report (JSONL) to this path.
    #[arg(long)]
    pub skips: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Main,
    Embodiment,
    Task,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long, value_enum, default_value = "main")]
    pub table: TableKind,
    /// Join samples against this manifest instead of the strata recorded in the results.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    /// Pairwise votes (JSONL).
    #[arg(long, required_unless_present = "human", conflicts_with = "human")]
    pub votes: Option<PathBuf>,
    /// Precomputed per-model human scores (JSON object or CSV) instead of votes.
    #[arg(long)]
    pub human: Option<PathBuf>,
    /// Leaderboard JSON/CSV from `aggregate`, or a model → score JSON object.
    #[arg(long)]
    pub bench: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs one command and returns the text to print on stdout.
pub fn run(cli: Cli) -> CliResult<String> {
    let overrides = settings::collect_overrides(&cli.overrides)?;
    let config = rbench_core::config::EngineConfig::with_overrides(&overrides)
        .map_err(CliError::io)?;
    match cli.command {
        Command::Validate(args) => validate::run(&args),
        Command::Score(args) => {
            let meta = RunMeta::new("score", &overrides);
            score::run(&args, &config, &meta)
        }
        Command::Aggregate(args) => {
            let meta = RunMeta::new("aggregate", &overrides);
            aggregate::run(&args, &meta)
        }
        Command::Agree(args) => {
            let meta = RunMeta::new("agree", &overrides);
            agree::run(&args, &meta)
        }
    }
}

pub(crate) fn read_text(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::io(anyhow::anyhow!("cannot read {}: {e}", path.display())))
}

pub(crate) fn write_text(path: &std::path::Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::io(anyhow::anyhow!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::io(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}
