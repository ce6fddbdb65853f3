use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "submodlab",
    version,
    about = "Non-monotone submodular maximization lab"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run an algorithm and print run records.
    Run(RunArgs),
    /// Brute-force optimum over size-<=k sets.
    Opt(OptArgs),
    /// Check a structural property of an instance.
    Check(CheckArgs),
    /// Replay a certificate or grid-minimize a factor-revealing program.
    Cert(CertArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// hard, hard-capped, a random family (modular, distinct_modular, coverage,
    /// cut_plus_modular, symmetric_cut, sum) or a fixture (toy-cut, mod-6,
    /// cover-3, sym-2, plateau).
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Decimal or a/b.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Plateau cap.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow a remainder after the last bucket of a hard instance.
    #[arg(long)]
    pub padding: bool,
    /// Wrap the generated instance in its symmetrization.
    #[arg(long)]
    pub symmetrize: bool,
    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Stream,
    Greedy,
    Fpt,
    Fptplus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub alg: Alg,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `uniform` (seeded) or `explicit:i,j,...`.
    #[arg(long, default_value = "uniform")]
    pub order: String,
    /// Batch mode: seeds seed..seed+N-1.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Compute the optimum (from the instance witness when present).
    #[arg(long)]
    pub with_opt: bool,
    /// Override the |H| threshold.
    #[arg(long)]
    pub threshold: Option<usize>,
    /// Buffer capacity.
    #[arg(long)]
    pub capacity: Option<usize>,
    /// Clear the accumulated I' before every guess.
    #[arg(long)]
    pub reset_selected_per_guess: bool,
    /// Recursive calls only extend the caller's guess.
    #[arg(long)]
    pub pass_guess: bool,
    /// Write the stream transcript as JSON lines (single trial only).
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Log collisions against the instance witness buckets, with A2 free,
    /// and write the log as JSON (single trial only).
    #[arg(long)]
    pub collision_log: Option<PathBuf>,
    /// Print wall_ms as NA so that output is byte-identical across runs.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct OptArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Submodular,
    Symmetric,
    Nonnegative,
    Monotone,
    NoHarm,
    Subsample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: CheckMode,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target set for the subsample bound, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub set: Vec<u32>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertMode {
    Certificate,
    Grid,
}

#[derive(Args, Debug)]
pub struct CertArgs {
    #[arg(long)]
    pub program: String,
    #[arg(long, value_enum, default_value = "certificate")]
    pub mode: CertMode,
    #[arg(long, default_value_t = 0.005)]
    pub resolution: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
}
