//! `qcf`: machine-readable verification reports for q-continued fractions.
//!
//! Exit codes: 0 all checks pass, 1 usage or configuration error, 2 verification failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qcf", version, about = "Exact and high-precision checks for q-continued fractions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Denominators at roots of unity against their closed forms.
    VerifyTable,
    /// Build and check finite prefixes of the divergence construction.
    Witness,
    /// Schur's evaluation against the periodic limit.
    Schur,
    /// `∏(1 + qⁱ) ≡ 1` at primitive odd-order roots.
    ProductIdentity,
    /// Decimal expansion of the tower number.
    CorollaryDigits,
    /// Parity limits of `K` outside the unit circle.
    OutsideLimits,
    /// GG versus S2 at roots of unity (exploratory, never fails).
    GgExplore,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Family name, or a comma-separated list (K, S1, S2, S3, GG).
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true)]
    pub m_min: Option<u64>,
    #[arg(long, global = true)]
    pub m_max: Option<u64>,
    #[arg(long, global = true)]
    pub stages: Option<usize>,
    /// Working precision in bits (at least 64).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    #[arg(long, global = true)]
    pub digits: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Point outside the unit circle, as an integer or fraction; repeatable.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Vec<String>,
    #[arg(long, global = true)]
    pub j_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
