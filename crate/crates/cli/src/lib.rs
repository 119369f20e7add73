//! Library side of the `lagfade` command-line tool: argument definitions,
//! spec documents and the subcommands, all returning their output as text
//! so they can be driven in-process.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod doc;
pub mod output;

pub use doc::{resolve, Resolved, SpecDoc};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid spec document: {0}")]
    Spec(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] fading_laguerre::Error),
}

impl CliError {
    /// Process exit status: 3 for a degenerate moment fit, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(fading_laguerre::Error::Fit(_)) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceKind {
    /// Closed form or Poisson mixture.
    Oracle,
    /// Adaptive quadrature of the closed-form density.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    DropGammaTerm,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format (default: csv; json for fit; a text report for validate).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Truncation tolerance, overriding the document's own.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random seed for the Monte Carlo checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "lagfade",
    version,
    about = "Laguerre-series distributions of fading envelopes"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate density and distribution function on the document's grid.
    Eval {
        /// JSON spec document; standard input when absent or "-".
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Fit (b, beta) by moment matching and print the coefficients.
    Fit {
        /// Built-in family name, e.g. rayleigh or nakagami_m.
        #[arg(long, conflicts_with = "samples", required_unless_present = "samples")]
        family: Option<String>,
        /// Family parameter as KEY=VALUE; repeat for each parameter.
        #[arg(long = "param", value_name = "KEY=VALUE", requires = "family")]
        params: Vec<String>,
        /// Sample file, one envelope value per line.
        #[arg(long, requires = "alpha")]
        samples: Option<PathBuf>,
        /// Transform exponent; defaults to the family's own.
        #[arg(long)]
        alpha: Option<f64>,
        /// Highest coefficient index.
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Maximum distribution-function error against a reference per truncation order.
    Converge {
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Truncation orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value = "oracle")]
        reference: ReferenceKind,
    },
    /// Run the validation suite.
    Validate {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match commands::execute(&cli, stdin) {
        Ok(done) => done,
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: e.exit_code(),
        },
    }
}
