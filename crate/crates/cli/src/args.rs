use std::path::PathBuf;

use boltzpart::tuner::{DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use boltzpart::Generator;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "boltzpart", version, about = "Exact uniform sampling of weighted integer partitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the parameter whose expected size is n.
    Tune(TuneArgs),
    /// Draw uniform partitions of size exactly n.
    Sample(SampleArgs),
    /// Exact counts c_0..c_n, one per line.
    Count(CountArgs),
    /// Poles, residues and acceptance bounds of a class.
    Analyze(AnalyzeArgs),
    /// Chi-square uniformity of the sampler against full enumeration.
    Validate(ValidateArgs),
    /// Attempts per accepted sample over a grid of sizes, with a log-log fit.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SpecArg {
    /// Class as inline JSON, e.g. '{"kind":"colored","d":3,"n":100}' or
    /// '{"kind":"poly","coeffs":["1"],"n":100}', or a path to such a file.
    #[arg(long)]
    pub spec: String,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long)]
    pub n: u64,
    /// Relative tolerance on |E[U_n] - n| / n.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Threads; output is reproducible for a fixed (seed, workers).
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Multiplicity generator for polynomial classes.
    #[arg(long, default_value = "grouped")]
    pub generator: Generator,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Keep building draws past twice the target size.
    #[arg(long)]
    pub no_space_cap: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = SampleFormat::Jsonl)]
    pub format: SampleFormat,
    /// Particle count m; adds the ground-state fraction to each record.
    #[arg(long)]
    pub particles: Option<u64>,
    /// Write records here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = CountFormat::Text)]
    pub format: CountFormat,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Also tune at this size and report acceptance estimates.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = 1e-3)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Ascending sizes, at least four.
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000,8000")]
    pub grid: Vec<u64>,
    /// Accepted samples per grid point.
    #[arg(long, default_value_t = 300)]
    pub samples: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}
