//! `lasvm`: preprocess KDD data, generate synthetic ground truth, run the
//! learning-automata feature selection and compare baseline against reduced
//! models.
//!
//! Every command writes its artifacts into an output directory (`--out`, or
//! `LASVM_OUT_DIR`). Report bodies never contain wall-clock measurements;
//! timings go to their own files.

mod commands;
pub mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

pub use commands::{evaluate, preprocess, select, synth};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "lasvm",
    version,
    about = "Learning-automata feature selection for linear SVMs"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode and scale a raw KDD'99 file into the numeric CSV format.
    Preprocess(PreprocessArgs),
    /// Generate a synthetic dataset with planted noise features.
    Synth(SynthArgs),
    /// Run feature selection and evaluate the reduced model.
    Select(SelectArgs),
    /// Compare a full-feature model with one trained without a given set.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Raw KDD file (plain or gzip).
    #[arg(long)]
    pub raw: PathBuf,
    /// Attack-name to category map; the built-in taxonomy if omitted.
    #[arg(long)]
    pub attack_map: Option<PathBuf>,
    /// Reuse a schema sidecar written by an earlier run (e.g. for a test file)
    /// instead of fitting a new one.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Where to write the schema sidecar; defaults to the output path with a
    /// `.schema.json` extension.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Informative feature count.
    #[arg(long, default_value_t = 5)]
    pub informative: usize,
    /// Pure-noise feature count.
    #[arg(long, default_value_t = 10)]
    pub noise: usize,
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    #[arg(long, default_value_t = 2.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "LASVM_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
}

/// Selection overrides; anything left unset falls back to the config file,
/// then to the built-in defaults.
#[derive(Debug, Default, Args)]
pub struct SelectFlags {
    /// Added to the calibrated accuracy to form the accuracy floor.
    #[arg(long, allow_hyphen_values = true)]
    pub t1_offset: Option<f64>,
    /// Removal threshold on the action probability.
    #[arg(long)]
    pub t2: Option<f64>,
    /// Reward step; 1/(10·N) if unset.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub pool_size: Option<usize>,
    /// Iterations per round; 200 × active features if unset.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub min_features: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub svm_c: Option<f64>,
    #[arg(long)]
    pub svm_epochs: Option<usize>,
    #[arg(long)]
    pub svm_tolerance: Option<f64>,
    /// Recompute the accuracy floor after every removal.
    #[arg(long)]
    pub recalibrate: bool,
    #[arg(long)]
    pub normal_quota: Option<usize>,
    #[arg(long)]
    pub dos_quota: Option<usize>,
    #[arg(long)]
    pub timing_repeats: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Training CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Test CSV; without it the training data is split.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Held-out fraction when no test file is given.
    #[arg(long, default_value_t = 0.3)]
    pub test_fraction: f64,
    /// TOML file with selection settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: SelectFlags,
    #[arg(long, env = "LASVM_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// JSON array of feature ids to drop, or a `report.json` from `select`.
    #[arg(long)]
    pub removed: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub svm_c: f64,
    #[arg(long, default_value_t = 100)]
    pub svm_epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, env = "LASVM_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
}

pub fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => "error",
        (false, 0) => "warn",
        (false, 1) => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess(args) => preprocess(&args),
        Command::Synth(args) => synth(&args),
        Command::Select(args) => select(&args),
        Command::Evaluate(args) => evaluate(&args),
    }
}
