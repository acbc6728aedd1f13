//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pfkernel::converge::GridLine;

use crate::config::{parse_complex, parse_complex_list, parse_grid, parse_line, parse_size_list, ComplexList, Grid, SizeList};
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "pfkernel", version, about = "Correlation kernels of planar symplectic random-matrix ensembles")]
pub struct Cli {
    /// key=value file supplying option defaults; explicit flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Grid of a limiting or finite-N one-point function: CSV x,y,R.
    #[command(args_override_self = true)]
    Density(DensityArgs),
    /// Table of pre-kernel values at point pairs.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Convergence-rate fit of R_{N,1} → R along an N ladder.
    #[command(args_override_self = true)]
    Converge(ConvergeArgs),
    /// Residuals of the Christoffel–Darboux identities and limiting ODEs.
    #[command(args_override_self = true)]
    Check(CheckArgs),
    /// Metropolis sampling with a binned one-point histogram.
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Spot values of the special functions.
    #[command(args_override_self = true)]
    Special(SpecialArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassKind {
    NhBulk,
    NhEdge,
    AhBulk,
    AhEdge,
    #[value(alias = "soft-hard")]
    Softhard,
    Hard,
}

/// Limiting class selection.
#[derive(Args, Debug, Clone)]
pub struct ClassArgs {
    #[arg(long, value_enum)]
    pub class: Option<ClassKind>,
    /// Effective non-Hermiticity c̃ of the almost-Hermitian bulk.
    #[arg(long)]
    pub ctilde: Option<f64>,
    /// Non-Hermiticity c of the almost-Hermitian edge.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PotentialKind {
    Elliptic,
    #[value(alias = "soft-hard")]
    Softhard,
    Hard,
}

impl PotentialKind {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::Elliptic => "elliptic",
            PotentialKind::Softhard => "softhard",
            PotentialKind::Hard => "hard",
        }
    }
}

/// Finite-N ensemble selection.
#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    #[arg(long, value_enum)]
    pub potential: Option<PotentialKind>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Base point: a number, `edge` or `-edge`.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    /// Evaluate the finite-N R_{N,1} of --potential instead of a limit.
    #[arg(long)]
    pub finite: bool,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// x0:x1:nx,y0:y1:ny in rescaled coordinates.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Grid,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    /// κ
    Raw,
    /// κ with Gaussian weights
    Weighted,
    /// the complex-kernel counterpart 𝒦 (limits only)
    Complex,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long)]
    pub finite: bool,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Comma-separated first arguments.
    #[arg(long, value_parser = parse_complex_list, allow_hyphen_values = true)]
    pub z: ComplexList,
    /// Comma-separated second arguments (defaults to the conjugates of --z).
    #[arg(long, value_parser = parse_complex_list, allow_hyphen_values = true)]
    pub w: Option<ComplexList>,
    #[arg(long, value_enum, default_value = "weighted")]
    pub kernel: KernelKind,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    AhEdge,
    AhBulk,
    #[value(alias = "soft-hard")]
    Softhard,
    Hard,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Rescaled point, e.g. -1+1i.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
    /// N ladder (at least 4 values).
    #[arg(long, value_parser = parse_size_list, default_value = "50,100,200,400")]
    pub n: SizeList,
    /// Line for a scaled profile N^r(R_N − R): h:y:x0:x1:count or v:x:y0:y1:count.
    #[arg(long, value_parser = parse_line, allow_hyphen_values = true)]
    pub profile: Option<GridLine>,
    /// Profile CSV file (stdout after the fit if absent).
    #[arg(long, value_name = "PATH")]
    pub profile_out: Option<PathBuf>,
    /// N of the profile (largest ladder value by default).
    #[arg(long)]
    pub profile_n: Option<usize>,
    /// Exponent of the profile scaling (fitted exponent by default).
    #[arg(long)]
    pub r: Option<f64>,
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// cd-skew, cd-orthogonal, rn12, transformed, limit-ode, cdi-limit or sweep.
    pub identity: String,
    /// Matrix sizes: a..b or a comma list.
    #[arg(long, value_parser = parse_size_list, default_value = "1..10")]
    pub n: SizeList,
    /// Fixed τ (random in [0, 0.9] if absent).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Fixed base point (random in [0, √2(1+τ)] if absent).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// Random point pairs per N (per class for the limits; total for sweep).
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub class: ClassArgs,
    /// Residual threshold (1e-8 for exact identities, 1e-5 for limits).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output file (stdout if absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 100_000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial Metropolis step (γ_N by default); tuned during burn-in.
    #[arg(long)]
    pub step: Option<f64>,
    /// Histogram bins x0:x1:nx,y0:y1:ny in rescaled coordinates.
    #[arg(long, value_parser = parse_grid, default_value = "-3:3:10,0:3:5", allow_hyphen_values = true)]
    pub window: Grid,
    /// Batches for the standard errors.
    #[arg(long, default_value_t = 40)]
    pub batches: u64,
    /// Independent chains (seeds seed, seed+1, …) run in parallel and pooled.
    #[arg(long, default_value_t = 1)]
    pub chains: u64,
    /// Compare against the finite-N R_{N,1}; exit 1 if any bin deviates by 4 standard errors.
    #[arg(long)]
    pub compare: bool,
    /// Dump of sampled configurations (single chain only).
    #[arg(long, value_name = "PATH")]
    pub samples_out: Option<PathBuf>,
    /// Keep every k-th configuration in the dump.
    #[arg(long, default_value_t = 1)]
    pub thin: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpecialFn {
    Erf,
    Erfc,
    Erfcx,
    /// Ai and Ai′ (k = 0, 1)
    Airy,
    /// e^{(2/3)z^{3/2}}·Ai(z)
    AiryScaled,
    /// γ(a, z)
    LowerGamma,
    /// Hermite H_k(z), k = 0..=n
    Hermite,
}

#[derive(Args, Debug)]
pub struct SpecialArgs {
    #[arg(value_enum)]
    pub function: SpecialFn,
    #[arg(long, value_parser = parse_complex_list, allow_hyphen_values = true)]
    pub z: ComplexList,
    /// Parameter a of the lower incomplete gamma function.
    #[arg(long)]
    pub a: Option<f64>,
    /// Highest Hermite degree.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
