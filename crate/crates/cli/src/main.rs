//! `mc`: maximal correlation from the command line.

mod commands;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maxcorr::io::InputError;
use maxcorr::tolerance::DEFAULT_STATE_CAP;
use maxcorr::verify::Suite;
use maxcorr::McError;

#[derive(Parser, Debug)]
#[command(name = "mc", version, about = "Exact and estimated maximal correlation coefficients")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    /// Largest state space (cells) any constructor may build.
    #[arg(long, value_name = "CELLS", default_value_t = DEFAULT_STATE_CAP, global = true)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// R(X,Y) of a finite joint given as JSON.
    Discrete {
        /// JSON file with x_labels, y_labels and probs.
        input: PathBuf,
    },
    /// Run a registered verification suite.
    Verify {
        /// paper-core, stable, subsets, estimators or all.
        suite: Suite,
    },
    /// Evaluate a closed-form identity.
    Formula(commands::FormulaArgs),
    /// Op(ν) of a stable Lévy measure.
    Stable {
        #[arg(long)]
        alpha: f64,
        /// Spectral measure JSON file, or bdk(LAMBDA,C_MINUS,C_PLUS).
        #[arg(long)]
        tau: String,
    },
    /// R of a two-dimensional Lévy process at any time.
    Levy {
        /// Lévy triple JSON file.
        #[arg(long)]
        triple: PathBuf,
    },
    /// Random subset schemes and subsampled vectors.
    Subsets(commands::SubsetsArgs),
    /// Binned empirical estimate from sampled or supplied pairs.
    Estimate(commands::EstimateArgs),
    /// Truncation ladder of a censoring family.
    Ladder(commands::LadderArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Input(InputError::Parse(_)) => 2,
            CliError::Input(InputError::Invalid(e)) | CliError::Mc(e) => match e {
                e if e.is_resource_cap() => 4,
                McError::MalformedInput(_) => 2,
                _ => 3,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        output: cli.output,
        cap: cli.cap,
        summary: std::io::stderr().is_terminal(),
    };
    let result = match cli.command {
        Command::Discrete { input } => commands::discrete(&ctx, &input),
        Command::Verify { suite } => commands::verify(&ctx, suite),
        Command::Formula(args) => commands::formula(&ctx, &args),
        Command::Stable { alpha, tau } => commands::stable(&ctx, alpha, &tau),
        Command::Levy { triple } => commands::levy(&ctx, &triple),
        Command::Subsets(args) => commands::subsets(&ctx, &args),
        Command::Estimate(args) => commands::estimate(&ctx, &args),
        Command::Ladder(args) => commands::ladder(&ctx, &args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
