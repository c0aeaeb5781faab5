//! `sentirec`: generate data, train and evaluate sentiment models, predict
//! polarity and recommend products from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sentirec::classify::ModelKind;
use sentirec::corpus::{Gender, Locality};
use sentirec::ErrorCategory;

#[derive(Debug, Parser)]
#[command(
    name = "sentirec",
    version,
    about = "Sentiment-aware insurance product recommendation"
)]
pub struct Cli {
    /// Seed for every stochastic step (generation, split, forest).
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    pub output: OutputMode,

    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic customer table as CSV.
    GenData(GenDataArgs),
    /// Train a classifier on a split of a CSV table and report held-out accuracy.
    Train(TrainArgs),
    /// Evaluate a saved model on a CSV table.
    Evaluate(EvaluateArgs),
    /// Print the polarity (0 or 1) of a feedback line.
    Predict(PredictArgs),
    /// Rank products for a new customer.
    Recommend(RecommendArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, default_value_t = 25_000)]
    pub rows: usize,
    /// Build the 25,000-row table with the 153-customer recommendation scenario.
    #[arg(long)]
    pub paper_fixture: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Share of rows held out for evaluation.
    #[arg(long, default_value_t = 0.3)]
    pub test_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// One of lr, mnb, rf.
    #[arg(long, value_parser = parse_kind)]
    pub model: ModelKind,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long)]
    pub max_terms: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long, conflicts_with = "no_depth_limit")]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub no_depth_limit: bool,
    #[arg(long)]
    pub min_samples_split: Option<usize>,
    /// Worker threads for forest training; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model_file: PathBuf,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Evaluate on every row instead of the held-out split.
    #[arg(long)]
    pub all_rows: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file; repeat three times together with --all.
    #[arg(long, required = true)]
    pub model_file: Vec<PathBuf>,
    #[arg(long)]
    pub text: String,
    /// Print one line per model in the order lr, rf, mnb.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model_file: PathBuf,
    #[arg(long)]
    pub age: u32,
    #[arg(long, value_parser = parse_gender)]
    pub gender: Gender,
    #[arg(long)]
    pub income: u32,
    #[arg(long, value_parser = parse_locality)]
    pub locality: Locality,
    #[arg(long)]
    pub feedback: String,
    /// Product the feedback refers to; left out of the ranking.
    #[arg(long, default_value_t = 1)]
    pub reviewed_product: u32,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: sentirec::Error| e.to_string())
}

fn parse_gender(s: &str) -> Result<Gender, String> {
    s.parse().map_err(|e: sentirec::Error| e.to_string())
}

fn parse_locality(s: &str) -> Result<Locality, String> {
    s.parse().map_err(|e: sentirec::Error| e.to_string())
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<sentirec::Error> for CliError {
    fn from(e: sentirec::Error) -> CliError {
        let code = match e.category() {
            ErrorCategory::Usage => 1,
            ErrorCategory::Data => 2,
            ErrorCategory::Numeric => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let level = if cli.verbose {
        log::LevelFilter::Debug
    } else {
        log::LevelFilter::Warn
    };
    env_logger::Builder::new().filter_level(level).init();

    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
