//! `cstar-schur`: run verification suites, counterexample searches and Novak
//! checks, and write machine-readable reports.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cstar-schur",
    version,
    about = "Schur products and positivity over finite-dimensional C*-algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite, or re-verify a stored witness.
    Verify(VerifyArgs),
    /// Search for positive M, N over a noncommutative algebra with M∘N not positive.
    Search(SearchArgs),
    /// Build the Novak matrix for given or random commuting points and certify it.
    Novak(NovakArgs),
    /// Print a few closed-form instances.
    Demo,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Block sizes of the algebra, e.g. `1,1` or `2,1`.
    #[arg(long)]
    pub shape: Option<String>,
    /// Matrix size.
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Relative positivity tolerance (default 1e-9, or CSTAR_SCHUR_TOL).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Generator style: `complex` or `real_commutative`.
    #[arg(long)]
    pub style: Option<String>,
    /// Scale of random entries.
    #[arg(long)]
    pub entry_scale: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Leave `elapsed` at zero so reports are byte-for-byte reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// JSON file supplying defaults for any of these options.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// One of all, schur, lowerbound, corollaries, novak, trig, preserver, module.
    #[arg(long)]
    pub suite: Option<String>,
    /// Coordinates per Novak point.
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Also evaluate power series with `a_0·E_n` as the constant term.
    #[arg(long)]
    pub entrywise_constant: bool,
    /// Bracketing of repeated Schur powers.
    #[arg(long, value_enum)]
    pub schur_power_paren: Option<Paren>,
    /// Stop each check at its first failing trial.
    #[arg(long)]
    pub stop_on_first: bool,
    /// Novak points file (`{"points": [[x_11, …, x_1d], …]}`); needs `--suite novak`.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Re-verify a witness file written by `search`.
    #[arg(long, conflicts_with = "points")]
    pub from_witness: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Paren {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchKind {
    /// Positive M, N with M∘N not positive.
    Schur,
    /// A, B, C with (A∘B)∘C ≠ A∘(B∘C).
    Associativity,
    /// Noncommuting pairs breaking the cosine addition formula.
    Trig,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: Option<SearchKind>,
    /// Stop at the first violation.
    #[arg(long)]
    pub stop_on_first: bool,
    /// Directory for witness files (default: next to the `--json` report).
    #[arg(long)]
    pub witness_dir: Option<PathBuf>,
    /// Most witness files written per matrix size.
    #[arg(long, default_value_t = 100)]
    pub max_witness_files: usize,
}

#[derive(Args, Debug)]
pub struct NovakArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Points file (`{"points": [[x_11, …, x_1d], …]}`).
    #[arg(long, conflicts_with = "random")]
    pub points: Option<PathBuf>,
    /// Draw n×d random commuting self-adjoint points instead.
    #[arg(long)]
    pub random: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => commands::verify(args),
        Command::Search(args) => commands::search(args),
        Command::Novak(args) => commands::novak(args),
        Command::Demo => commands::demo(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
