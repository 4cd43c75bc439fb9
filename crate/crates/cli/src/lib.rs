//! `umrahguard` command-line driver.
//!
//! Every subcommand reads an optional JSON run config (`--config`), applies
//! the flag overrides (`--seed`, `--folds`, `--out` and the per-command
//! flags win over the file), does its work, writes its reports under the
//! output directory together with `run-manifest.json`, and exits with 0 on
//! success, 1 on a domain error, 2 on a usage error.

mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{AugmentationConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "umrahguard",
    version,
    about = "Classify Hajj/Umrah travel apps as official or unofficial"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random choice (required here or in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of cross-validation folds.
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    /// Output directory (for gen-data: the dataset file).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Svm,
    Rf,
    Nb,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset in JSON-lines form.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Registry snapshot used to label records that carry no label.
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic labeled corpus.
    GenData {
        /// Also write the matching registry snapshot here.
        #[arg(long)]
        registry_out: Option<PathBuf>,
    },
    /// Train one model on the whole dataset and save it.
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Use the tuned reference settings of this family.
        #[arg(long, value_enum)]
        family: Option<Family>,
    },
    /// Cross-validate the configured models, or score a saved model on a
    /// labeled dataset.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        /// Saved model to score instead of cross-validating.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Exhaustive hyperparameter search with cross-validation.
    GridSearch {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        family: Option<Family>,
    },
    /// Compare feature configurations on identical folds.
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        family: Option<Family>,
    },
    /// Rank features of a saved model (default: a reference random forest
    /// trained on the dataset).
    Importance {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Rows printed to the terminal.
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
    /// Label every record of a JSON-lines file with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Serve a saved model over HTTP.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenData { .. } => "gen-data",
            Command::Train { .. } => "train",
            Command::Evaluate { .. } => "evaluate",
            Command::GridSearch { .. } => "grid-search",
            Command::Ablate { .. } => "ablate",
            Command::Importance { .. } => "importance",
            Command::Predict { .. } => "predict",
            Command::Serve { .. } => "serve",
        }
    }
}

/// An error caused by how the tool was invoked rather than by the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let recorded: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::execute(cli, recorded) {
        Ok(()) => 0,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}\n\nRun `umrahguard --help` for usage.");
            2
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
