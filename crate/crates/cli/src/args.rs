use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use laguerre2d::MomentFn;

#[derive(Debug, Parser)]
#[command(
    name = "laguerre2d",
    version,
    about = "Generalized 2D Laguerre polynomials: evaluation, tables and identity checks"
)]
pub struct Cli {
    /// Output format (eval defaults to plain text, check to json, table to csv)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplier applied to every floating-point tolerance
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol: f64,
    /// Seed for randomized sample points
    #[arg(long, global = true, default_value_t = 20240611)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Z_{m,n} at a complex point or a quaternion
    Eval(EvalArgs),
    /// Run an identity-check suite and emit its reports
    Check(CheckArgs),
    /// Generate a data table
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Complex point, e.g. 0.7+0.3i
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "q",
        required_unless_present = "q"
    )]
    pub z: Option<String>,
    /// Quaternion as x0,x1,x2,x3
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Print every evaluation path and their largest difference
    #[arg(long)]
    pub dual_path: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ladder,
    Commutators,
    Recurrences,
    Ortho,
    Sums,
    Moments,
    Quat,
    Quantize,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Ladder => "ladder",
            Suite::Commutators => "commutators",
            Suite::Recurrences => "recurrences",
            Suite::Ortho => "ortho",
            Suite::Sums => "sums",
            Suite::Moments => "moments",
            Suite::Quat => "quat",
            Suite::Quantize => "quantize",
        }
    }
}

pub fn parse_moment(s: &str) -> Result<MomentFn, String> {
    MomentFn::parse(s).ok_or_else(|| format!("unknown function '{s}' (one, z, zbar, zsq_abs, theta)"))
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub suite: Suite,
    /// Largest index
    #[arg(long)]
    pub mmax: Option<usize>,
    /// Comma-separated beta values
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta: Vec<f64>,
    /// Comma-separated moment functions (moments suite)
    #[arg(long, value_delimiter = ',', value_parser = parse_moment)]
    pub f: Vec<MomentFn>,
    /// Lower index for the quantize suite, largest lower index for sums
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation for the quantize suite
    #[arg(long = "M")]
    pub m_max: Option<usize>,
    /// Random sample points per case (ladder, sums, quat)
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Use exact rational coefficients (ladder, commutators, recurrences)
    #[arg(long)]
    pub exact: bool,
    /// Quaternionic moments by the 4D product rule instead of the slice route
    #[arg(long)]
    pub brute_force: bool,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub ntheta: Option<usize>,
    #[arg(long)]
    pub nphi: Option<usize>,
    #[arg(long)]
    pub npsi: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Coeffs,
    Norms,
    Kernel,
    QuantizeMatrix,
    Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    Laguerre,
    Legendre,
    Circle,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    pub what: TableKind,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub mmax: Option<usize>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Moment function for quantize-matrix
    #[arg(long, value_parser = parse_moment)]
    pub f: Option<MomentFn>,
    /// Truncation (quantize-matrix, kernel)
    #[arg(long = "M")]
    pub m_max: Option<usize>,
    /// Complex points for the kernel table (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    pub z: Vec<String>,
    /// Quadrature rule family (rule table)
    #[arg(long, value_enum, default_value = "laguerre")]
    pub kind: RuleKind,
    /// Number of nodes (rule table)
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    /// Gauss–Laguerre exponent (rule table)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
}
