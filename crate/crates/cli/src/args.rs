//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used whenever `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(
    name = "steinhaus",
    version,
    about = "Khinchin constants, negative moments and certified checks for Steinhaus sums"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Record wall-clock runtimes (otherwise `runtime_ms` is null and output is reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Re-check the numerical claims behind the sharp bound.
    Verify(VerifyArgs),
    /// Evaluate a constant at one exponent.
    Constant(ConstantArgs),
    /// Negative moment E|sum a_j xi_j|^{-p} by one or more methods.
    Moment(MomentArgs),
    /// Certified lower bounds d-(j), d+(j) next to the published table.
    Table1(Table1Args),
    /// Plot data: (p, A_p, B_p) or (s, Psi_p(s)).
    Sweep(SweepArgs),
    /// Rényi entropies of a Steinhaus sum and of the complex Gaussian.
    Entropy(EntropyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    /// Explicit comma-separated p values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub p_step: Option<f64>,
    /// Explicit comma-separated s values.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    #[arg(long)]
    pub s_min: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub s_step: Option<f64>,
    /// Halve every default grid step this many times.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Bounds {
    /// Bounds as sharp as the derivation allows.
    Tight,
    /// Bounds exactly as printed, which reproduce the published digits.
    Displayed,
}

#[derive(Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LemmaArg {
    All,
    #[value(name = "fp-le-up")]
    FpLeUp,
    #[value(name = "up-le-gp")]
    UpLeGp,
    #[value(name = "fp3-table")]
    Fp3Table,
    #[value(name = "d-logconvex")]
    DLogconvex,
    #[value(name = "ext-concavity")]
    ExtConcavity,
    #[value(name = "base-case")]
    BaseCase,
    #[value(name = "main-inequality")]
    MainInequality,
    #[value(name = "l-bound")]
    LBound,
    #[value(name = "holder-chain")]
    HolderChain,
    #[value(name = "psi-master")]
    PsiMaster,
    #[value(name = "renyi-upper")]
    RenyiUpper,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub lemma: LemmaArg,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Random pairs per p for ext-concavity.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Random unit instances for main-inequality.
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    /// Largest instance length for main-inequality.
    #[arg(long, default_value_t = 6)]
    pub max_n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Bounds::Tight)]
    pub bounds: Bounds,
    /// Coefficient vectors for renyi-upper, separated by ';' (each normalised).
    #[arg(long)]
    pub coeffs: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstantName {
    #[value(name = "Cp")]
    Cp,
    Kappa,
    #[value(name = "psi2")]
    Psi2,
    #[value(name = "D")]
    D,
    #[value(name = "Ap")]
    Ap,
    #[value(name = "Bp")]
    Bp,
    Pstar,
}

#[derive(Args, Debug)]
pub struct ConstantArgs {
    #[arg(long, value_enum)]
    pub name: ConstantName,
    /// Exponent (ignored for pstar).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Mc,
    Series,
    All,
}

#[derive(Args, Debug)]
pub struct MomentArgs {
    /// Comma-separated coefficients.
    #[arg(long, value_delimiter = ',', required_unless_present = "coeffs_file")]
    pub coeffs: Option<Vec<f64>>,
    /// File with whitespace- or comma-separated coefficients.
    #[arg(long)]
    pub coeffs_file: Option<PathBuf>,
    /// Rescale the coefficients to unit Euclidean norm.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Quad)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    #[arg(long, value_enum, default_value_t = Bounds::Tight)]
    pub bounds: Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Constants,
    Psi,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub kind: SweepKind,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Width target for certified Psi values.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    /// Comma-separated coefficients (normalised to unit norm).
    #[arg(long, value_delimiter = ',', conflicts_with = "equal")]
    pub coeffs: Option<Vec<f64>>,
    /// Use n equal coefficients.
    #[arg(long)]
    pub equal: Option<usize>,
    /// Comma-separated p values in [0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub p: Vec<f64>,
    /// Radial grid size.
    #[arg(long, default_value_t = 2048)]
    pub points: usize,
}
