//! `diskembed`: split, train, evaluate, reverse and verify.
//!
//! Exit codes: 0 success, 1 validation or configuration error, 2 I/O error,
//! 3 property-verification failure.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diskembed::GeometryKind;

#[derive(Parser)]
#[command(name = "diskembed", version, about = "Disk embeddings of directed acyclic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build train/validation/test splits from an edge list.
    Split(SplitArgs),
    /// Train disk embeddings on a split directory.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a split directory.
    Eval(EvalArgs),
    /// Reverse every edge of an edge list.
    Reverse(ReverseArgs),
    /// Run the numerical property suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SplitArgs {
    /// Edge list, one `child<TAB>parent` per line.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Output manifest directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    percent_nonbasic: Option<f64>,
    #[arg(long)]
    valid_count: Option<usize>,
    #[arg(long)]
    test_count: Option<usize>,
    #[arg(long)]
    neg_ratio: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Split manifest directory.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Output directory for checkpoint.jsonl, metrics.csv and config.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    geometry: Option<GeometryKind>,
    /// Ambient coordinates for the sphere, intrinsic dimension otherwise.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    init_center_scale: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    init_radius: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalSplit {
    Train,
    Valid,
    Test,
}

impl fmt::Display for EvalSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalSplit::Train => "train",
            EvalSplit::Valid => "valid",
            EvalSplit::Test => "test",
        })
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    split: Option<PathBuf>,
    /// Directory for report.json and report.csv (default: next to the checkpoint).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which pairs to report on; the threshold is always tuned on validation.
    #[arg(long, value_enum, default_value_t = EvalSplit::Test)]
    on: EvalSplit,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReverseArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InjectFault {
    GradientSign,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cone constant K.
    #[arg(long, default_value_t = 0.1)]
    k: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Deliberately break a kernel to check that the suite notices.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<InjectFault>,
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    stage: &'static str,
    message: String,
}

impl CliError {
    pub fn config(stage: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            stage,
            message: message.into(),
        }
    }

    pub fn io(stage: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            stage,
            message: message.into(),
        }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            stage: "verify",
            message: message.into(),
        }
    }

    pub fn from_core(stage: &'static str, err: diskembed::Error) -> Self {
        match err {
            diskembed::Error::Io(e) => CliError::io(stage, e.to_string()),
            other => CliError::config(stage, other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Split(a) => commands::split(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Reverse(a) => commands::reverse(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {}", e.stage, e.message);
            ExitCode::from(e.code)
        }
    }
}
