//! Command-line front end: `subfrac integrate | derive | solve | perturb | check`.
//!
//! Exit codes: 0 on success, 1 for invalid input (including argument errors),
//! 2 for numerical failures and for failed checks.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 2,
            CliError::ChecksFailed(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "subfrac",
    version,
    about = "Generalized substantial fractional calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the generalized substantial integral of a function.
    Integrate(OperatorArgs),
    /// Tabulate a Riemann-Liouville or Caputo type derivative.
    Derive(DeriveArgs),
    /// Solve a Caputo-type initial value problem.
    Solve(SolveArgs),
    /// Compare a problem with a perturbed copy against the dependence bound.
    Perturb(PerturbArgs),
    /// Run the invariant suite and print a JSON summary.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct OperatorArgs {
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Lower limit of integration.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    /// Power of the built-in input `e^{-sigma t^rho} (t^rho - a^rho)^beta`.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Right end of the grid (defaults to 1, or the last sample of --func).
    #[arg(long)]
    t_end: Option<f64>,
    /// Number of grid intervals.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// CSV with columns `t,value` used instead of the built-in input.
    #[arg(long)]
    func: Option<PathBuf>,
    /// Parameter sweep `name=start:end:step` over alpha, rho, sigma or beta.
    #[arg(long)]
    sweep: Option<String>,
    /// Product-integration rule: trapezoid or rectangle.
    #[arg(long, default_value = "trapezoid")]
    scheme: String,
    #[arg(long, default_value = "subfrac-out")]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DerivativeKind {
    Rl,
    Caputo,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct DeriveArgs {
    #[arg(long, value_enum)]
    kind: DerivativeKind,
    #[command(flatten)]
    #[serde(flatten)]
    op: OperatorArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct ProblemArgs {
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Initial data `b0[,b1,...]`, one value per integer below ceil(alpha).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    b0: Vec<f64>,
    /// Right-hand side: zero, linear:<l>, example2 or shifted:<l>:<c>.
    #[arg(long, default_value = "zero")]
    rhs: String,
    /// Horizon of the solve.
    #[arg(long, conflicts_with = "auto_h")]
    h: Option<f64>,
    /// Use the guaranteed existence horizon (needs --K, --M, --L, --h-star, --h-tilde).
    #[arg(long)]
    auto_h: bool,
    /// Tube radius around the initial-data term.
    #[arg(long = "K")]
    k: Option<f64>,
    /// Bound on |f| inside the tube.
    #[arg(long = "M")]
    m: Option<f64>,
    /// Lipschitz constant of f in y.
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    h_star: Option<f64>,
    #[arg(long)]
    h_tilde: Option<f64>,
    /// Solve even when h exceeds the guaranteed existence horizon.
    #[arg(long)]
    force_horizon: bool,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// picard or step.
    #[arg(long, default_value = "picard")]
    method: String,
    #[arg(long, default_value_t = 1e-10)]
    picard_tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 2)]
    corrector_iters: usize,
    #[arg(long, default_value = "subfrac-out")]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Example {
    /// Four initial values 1.0, 1.2, 1.4, 1.6 of `D y = 0.9 y`, sigma 1, rho 0.5, alpha 0.5, h 1.
    Stability,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct SolveArgs {
    /// Run a built-in example instead of the problem flags.
    #[arg(long, value_enum)]
    example: Option<Example>,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PerturbKind {
    Initial,
    Force,
    Order,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct PerturbArgs {
    #[arg(value_enum)]
    kind: PerturbKind,
    /// Perturbed initial data (defaults to --b0).
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    /// Perturbed right-hand side, same grammar as --rhs.
    #[arg(long)]
    f_tilde: Option<String>,
    /// Raised order.
    #[arg(long)]
    alpha_tilde: Option<f64>,
    /// Extra initial values when ceil(alpha~) > ceil(alpha).
    #[arg(long, value_delimiter = ',')]
    b_extra: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct CheckArgs {
    /// Run only one group.
    #[arg(long)]
    only: Option<String>,
    /// Replace every tolerance by this value.
    #[arg(long)]
    tolerance_override: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write check.json and manifest.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Integrate(a) => commands::integrate(&a),
        Command::Derive(a) => commands::derive(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Perturb(a) => commands::perturb(&a),
        Command::Check(a) => commands::check(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
