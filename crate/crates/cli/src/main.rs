//! `tverberg`: generate instances, run the solvers, verify partitions and
//! sweep bound ratios. JSON in, JSON out; a short summary goes to stdout when
//! `--out` is given (to stderr otherwise, keeping stdout pure JSON).

mod commands;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tverberg::constructions::InstanceKind;
use tverberg::NormKind;

#[derive(Parser, Debug)]
#[command(name = "tverberg", version, about = "Colorful Tverberg partitions with intersection certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance as JSON.
    Generate(GenerateArgs),
    /// Run the swap local search and certify the result.
    Solve(SolveArgs),
    /// Certify a given partition of an instance.
    Verify(VerifyArgs),
    /// Run one of the built-in demonstrations.
    Demo(DemoArgs),
    /// Solve many random instances and aggregate bound ratios per (k, r).
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Euclid,
    Banach,
    Hyper,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceOpts {
    #[arg(long, value_enum, default_value = "euclid")]
    pub space: SpaceArg,
    /// Norm for `--space banach`: l1, l2, l1.5, linf.
    #[arg(long, default_value = "linf")]
    pub norm: NormKind,
    /// Shorthand for `--norm lP`; overrides `--norm`.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, default_value = "gaussian")]
    pub kind: InstanceKind,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Exponent for lp_orthogonal_simplices.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of the chart coordinates for hyperbolic instances.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub space: SpaceOpts,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Certificate tolerance, relative to the instance scale.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Minimum objective gain for accepting a swap; defaults to a scale-aware value.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of seeded initial partitions; the best objective wins.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// Cross-check against the brute-force optimum.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceOpts,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Partition JSON `{"assignment": [[...], ...]}`.
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    /// Disjoint circles on the sphere for both partitions of a colored square.
    SphericalSquare,
    /// Unit square, two colors: the tight Euclidean case.
    Square,
    /// Orthogonal regular simplices: smallest ball meeting every hull.
    LpOrthogonalSimplices,
    /// Isometric ℓ₁ → ℓ∞ embedding: the tight ℓ∞ case.
    LinfEmbedding,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    pub kind: DemoKind,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub space: SpaceOpts,
    /// Inclusive range `a..b`, or a single value.
    #[arg(long, default_value = "2..5")]
    pub k: sweep::Range,
    #[arg(long, default_value = "2..4")]
    pub r: sweep::Range,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: SweepFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Solve(a) => commands::solve(a),
        Command::Verify(a) => commands::verify(a),
        Command::Demo(a) => commands::demo(a),
        Command::Sweep(a) => sweep::run(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
