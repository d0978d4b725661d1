use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tessel", version, about = "Low-discrepancy one-bit tessellations of the sphere")]
pub struct Cli {
    /// Worker threads for batch experiments (default: all cores). Results do
    /// not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random or jittered point set.
    Gen(GenArgs),
    /// Discrepancy of a point set.
    Disc(DiscArgs),
    /// Compare exact and Monte-Carlo L² wedge discrepancy over a grid.
    StolarskyVerify(StolarskyArgs),
    /// Mean L² wedge discrepancy against N, with the fitted log-log slope.
    Scaling(ScalingArgs),
    /// Sup-discrepancy lower bounds over many seeds, or a bracket for one file.
    Sup(SupArgs),
    /// Explicit constants and size bounds.
    Bounds(BoundsArgs),
    /// Minimize the wedge energy by Riemannian gradient descent.
    Minimize(MinimizeArgs),
    /// Summarize an equal-area partition.
    PartitionInspect(PartitionArgs),
    /// Sign patterns of query points under a point set.
    Embed(EmbedArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenMethod {
    Random,
    Jittered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Wedge,
    Cap,
    Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Mc,
    SupLower,
    SupUpper,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "jittered")]
    pub method: GenMethod,
    /// Sphere dimension (points live in R^(d+1)).
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    #[arg(short = 'N')]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; `.json` selects JSON, anything else CSV.
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "wedge")]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Monte-Carlo sample count.
    #[arg(short = 'M', default_value_t = 1_000_000)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluations for the sup lower-bound search.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Accuracy of the approximating family for the sup upper bound.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Also write the report here.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StolarskyArgs {
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    /// Comma-separated set sizes.
    #[arg(long = "n", value_delimiter = ',', default_value = "1,2,8,32")]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(short = 'M', default_value_t = 2_000_000)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the CSV table here instead of standard output.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_enum, default_value = "jittered")]
    pub method: GenMethod,
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    #[arg(long = "n", value_delimiter = ',', default_value = "16,64,256,1024")]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the per-N CSV table here.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SupArgs {
    /// Bracket the sup of this point set instead of running seed trials.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jittered")]
    pub method: GenMethod,
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    #[arg(short = 'N', default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// With `--input`, also compute the net upper bound at this accuracy.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(short = 'd')]
    pub d: usize,
    /// Also report the size bounds for a delta-uniform tessellation.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// Starting set; a random set of `-d`, `-N`, `--seed` otherwise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    #[arg(short = 'N', default_value_t = 12)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(short = 'd', default_value_t = 2)]
    pub d: usize,
    #[arg(short = 'N')]
    pub n: usize,
    /// Uniform probes for the empirical cell-measure check (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// The hyperplane normals `Z`.
    pub z: PathBuf,
    /// Points to embed.
    pub points: PathBuf,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}
