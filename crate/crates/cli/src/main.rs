//! `failsafe`: command-line front end for failsafe-core.
//!
//! Exit codes: 0 success, 1 hypotheses not met (`verify`), 2 invalid input
//! or unsupported request, 3 hypotheses met but dominance violated.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "failsafe",
    version,
    about = "Second-order-statistic reliability of dependent fail-safe systems"
)]
pub struct Cli {
    /// JSON run configuration; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Random seed (default: config, then $FAILSAFE_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub tolerances: ToleranceFlags,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Clone, Args)]
pub struct ToleranceFlags {
    #[arg(long, global = true)]
    pub dominance_tol: Option<f64>,
    #[arg(long, global = true)]
    pub crossing_tol: Option<f64>,
    #[arg(long, global = true)]
    pub shape_tol: Option<f64>,
    #[arg(long, global = true)]
    pub classification_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Default, Clone, Args)]
pub struct GridFlags {
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Lower end of the grid.
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// Upper end of the grid.
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify two parameter vectors under every preorder.
    Preorder {
        /// First vector, comma separated.
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "a_file",
            required_unless_present = "a_file"
        )]
        a: Option<String>,
        /// File holding the first vector (JSON array or delimited numbers).
        #[arg(long)]
        a_file: Option<PathBuf>,
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "b_file",
            required_unless_present = "b_file"
        )]
        b: Option<String>,
        #[arg(long)]
        b_file: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Survival curve of the second-smallest lifetime as CSV.
    Curve {
        /// System JSON.
        #[arg(required_unless_present = "emit_figures")]
        system: Option<PathBuf>,
        /// Second system; emits `x,survival_x,survival_y,gap`.
        #[arg(long)]
        paired: Option<PathBuf>,
        #[command(flatten)]
        grid: GridFlags,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the bundled configurations' curves under this directory.
        #[arg(long, conflicts_with_all = ["system", "paired", "out"])]
        emit_figures: Option<PathBuf>,
    },
    /// Check a dominance theorem's hypotheses and the curves themselves.
    Verify {
        /// One of t1, t2, p-mphrs, p-ls.
        theorem: String,
        system_x: PathBuf,
        system_y: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the analytic survival with a Monte-Carlo estimate.
    Simulate {
        system: PathBuf,
        #[arg(long)]
        count: Option<usize>,
        #[command(flatten)]
        grid: GridFlags,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sampled lifetime matrix.
        #[arg(long)]
        lifetimes: Option<PathBuf>,
    },
    /// Marginal and copula fitting with goodness-of-fit tables.
    Fit {
        data: PathBuf,
        #[arg(long)]
        boot_n: Option<usize>,
        /// Copula estimator.
        #[arg(long, value_enum, default_value_t = CopulaMethod::Tau)]
        copula_method: CopulaMethod,
        /// Rank orientation of the pseudo-observations. `survival` recovers
        /// the survival copula that couples lifetimes in the system model.
        #[arg(long, value_enum, default_value_t = Orientation::Distribution)]
        orientation: Orientation,
        /// Candidate component groups, e.g. "1,3,7,8;2,4,5,9".
        #[arg(long)]
        subsets: Option<String>,
        /// Directory for report.json, criteria.csv and copula_gof.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CopulaMethod {
    Tau,
    PseudoLikelihood,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Distribution,
    Survival,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("failsafe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
