use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "orbital",
    version,
    about = "Absolute continuity of orbital measure convolutions on SO₀(p,q)/SO(p)×SO(q) and its complex and quaternionic analogues"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the eligibility predicate for a pair of configurations.
    Eligibility(RunArgs),
    /// Decide absolute continuity of the convolution for a pair.
    Decide(RunArgs),
    /// Sample Cartan projections of e^X K e^Y.
    Sample(RunArgs),
    /// Minimal absolutely continuous convolution power of X.
    Power(RunArgs),
    /// Run the verification suite at desk scale.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// R, C or H.
    #[arg(long, default_value = "R")]
    pub field: String,
    /// Configuration of X, e.g. "2,1;0".
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Configuration of Y.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Explicit Cartan coordinates of X, e.g. 3.0,2.0,1.0.
    #[arg(
        long = "x-values",
        value_delimiter = ',',
        allow_hyphen_values = true,
        num_args = 1
    )]
    pub x_values: Option<Vec<f64>>,
    /// Explicit Cartan coordinates of Y.
    #[arg(
        long = "y-values",
        value_delimiter = ',',
        allow_hyphen_values = true,
        num_args = 1
    )]
    pub y_values: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Restrict to one shape (q defaults to p + 1).
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Haar draws per certificate search.
    #[arg(long, default_value_t = orbital_core::density::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Points per sampled cloud.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative singular value cutoff for numerical ranks.
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Absolute tolerance for entries and root values.
    #[arg(long = "tol-entry")]
    pub tol_entry: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
