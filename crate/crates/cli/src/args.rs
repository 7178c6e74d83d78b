use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hopss", version, about = "Generate, verify and benchmark PDE training datasets")]
pub struct Cli {
    /// Master seed; per-sample streams are derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON configuration with the same schema as a manifest's generation block.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Traditional solver run, downsampled to training resolution.
    GenBase(GenBaseArgs),
    /// Perturb a base dataset into a larger one.
    Hopss(HopssArgs),
    /// Mix a base dataset with random normalized weights.
    Mixup(MixupArgs),
    /// Check every pair against the discrete equation.
    Verify(VerifyArgs),
    /// Time traditional against HOPSS generation.
    Bench(BenchArgs),
    /// Dump a 1D dataset as one CSV file per sample.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdeKind {
    Ns2d,
    Burgers,
    Kdv,
}

impl PdeKind {
    pub fn key(self) -> &'static str {
        match self {
            PdeKind::Ns2d => "ns2d",
            PdeKind::Burgers => "burgers",
            PdeKind::Kdv => "kdv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpatialArg {
    Subsample,
    SpectralTruncation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseForcingArg {
    Residual,
    Downsampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NonlinearArg {
    Convective,
    Conservative,
}

/// Traditional-generation parameters; unset values come from the preset of
/// `--pde` or from `--config`.
#[derive(Debug, Clone, Args)]
pub struct TraditionArgs {
    #[arg(long, value_enum)]
    pub pde: Option<PdeKind>,
    /// Fine grid points per dimension.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub length: Option<f64>,
    /// NS2D viscosity.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Burgers Reynolds number.
    #[arg(long)]
    pub reynolds: Option<f64>,
    /// KdV linear advection coefficient.
    #[arg(long = "lambda")]
    pub lambda_adv: Option<f64>,
    /// KdV nonlinear coefficient.
    #[arg(long = "alpha-nl")]
    pub alpha_nl: Option<f64>,
    /// KdV dispersion coefficient.
    #[arg(long = "beta")]
    pub beta_disp: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fine steps between recorded frames.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Spatial coarsening factor.
    #[arg(long)]
    pub coarsen: Option<usize>,
    #[arg(long, value_enum)]
    pub spatial: Option<SpatialArg>,
    #[arg(long, value_enum)]
    pub base_forcing: Option<BaseForcingArg>,
    #[arg(long, value_enum)]
    pub nonlinear: Option<NonlinearArg>,
    #[arg(long)]
    pub blowup_cap: Option<f64>,
    /// Start every trajectory from zero instead of a GRF draw.
    #[arg(long)]
    pub zero_ic: bool,
    #[arg(long)]
    pub ic_tau: Option<f64>,
    #[arg(long)]
    pub ic_alpha: Option<f64>,
    #[arg(long)]
    pub ic_sigma: Option<f64>,
    #[arg(long)]
    pub f_tau: Option<f64>,
    #[arg(long)]
    pub f_alpha: Option<f64>,
    #[arg(long)]
    pub f_sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenBaseArgs {
    #[command(flatten)]
    pub tradition: TraditionArgs,
    /// Number of trajectories.
    #[arg(long)]
    pub count: Option<usize>,
    /// Record the creation time in the manifest (output is then no longer
    /// byte-reproducible).
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    MultiSine,
    Perlin,
    RandomWalk,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    /// Absolute standard deviation of gaussian noise.
    #[arg(long, conflicts_with = "epsilon")]
    pub sigma: Option<f64>,
    /// Relative amplitude: the noise peak (or std for gaussian) is
    /// epsilon times the peak of the reference frame.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sinusoid count for multi-sine noise.
    #[arg(long)]
    pub k_modes: Option<usize>,
    /// Lattice cells for Perlin noise.
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HopssArgs {
    /// Base dataset file.
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub count: Option<usize>,
    /// Perturbation scale.
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Debug, Args)]
pub struct MixupArgs {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Base dataset; HOPSS pairs are then checked against their base pair.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "convective")]
    pub nonlinear: NonlinearArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub tradition: TraditionArgs,
    /// Use the 64² Navier–Stokes desk configuration (2000 steps of 5e-3).
    #[arg(long)]
    pub desk: bool,
    /// Base pairs N_b.
    #[arg(long)]
    pub base_count: Option<usize>,
    /// Generated pairs N_new.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Traditional samples to compare against (default N_new).
    #[arg(long)]
    pub tradition_count: Option<usize>,
    /// Traditional samples actually run; the total is scaled up when fewer.
    #[arg(long)]
    pub tradition_measured: Option<usize>,
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Also fit per-sample cost against these fine step counts.
    #[arg(long, value_delimiter = ',')]
    pub scaling_steps: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: ExportFormat,
}
