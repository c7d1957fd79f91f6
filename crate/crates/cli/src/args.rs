use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "curs", version, about = "Curvature-based rejection sampling experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw samples and write them as JSON lines.
    Sample(SampleArgs),
    /// Empirical and theoretical acceptance probabilities over a σ grid, as CSV.
    AcceptanceSweep(SweepArgs),
    /// General and sharp acceptance probabilities on the reference σ grids.
    Tables(TablesArgs),
    /// Run the validation suites and print a JSON report.
    Validate(ValidateArgs),
    /// Normalizing constants, acceptance probability and δ as JSON.
    Theory(TheoryArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ManifoldArg {
    Spd,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    General,
    Sharp,
    Cutlocus,
}

#[derive(Args, Debug, Clone)]
pub struct GeometryArgs {
    #[arg(long, value_enum, default_value = "spd")]
    pub manifold: ManifoldArg,
    /// Matrix size N.
    #[arg(long)]
    pub n: usize,
    /// Field of the SPD family: 1 real, 2 complex, 4 quaternion.
    #[arg(long, default_value_t = 1)]
    pub beta: u32,
}

#[derive(Args, Debug, Clone)]
pub struct LawArgs {
    /// Exponent of the generalized Gaussian `exp(−r^α/2σ²)`.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, conflicts_with = "uniform")]
    pub sigma: Option<f64>,
    /// Flat radial law `f ≡ 1` (unitary group only).
    #[arg(long)]
    pub uniform: bool,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Falls back to CURS_SEED, then 0.
    #[arg(long, env = "CURS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker count. Output is reproducible only with one thread.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub law: LawArgs,
    /// Defaults to general on SPD and cutlocus on the unitary group.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// JSON point to centre the samples on.
    #[arg(long)]
    pub base_file: Option<PathBuf>,
    /// Round budget per sample.
    #[arg(long)]
    pub max_rounds: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// `start:stop:step`, inclusive of `stop`.
    #[arg(long)]
    pub sigma_grid: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub rounds: u64,
    /// Skip the closed-form columns even where they exist.
    #[arg(long)]
    pub no_theory: bool,
    /// Also draw the sweep as an SVG plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct TablesArgs {
    /// 4 or 6.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub rounds: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// all, geometry, ode, haar, marginals or sharp-equivalence.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, env = "CURS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub law: LawArgs,
    /// Monte Carlo target normalizer, for any supported geometry.
    #[arg(long)]
    pub mc: bool,
    /// Sphere draws for the Monte Carlo estimate.
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, env = "CURS_SEED", default_value_t = 0)]
    pub seed: u64,
}
