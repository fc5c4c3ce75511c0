use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "momentsq",
    version,
    about = "Syzygy sets, Vinogradov counts and square-function norms for the moment curve"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file of `flag = value` pairs; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Include wall-clock timings (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the syzygy set S(delta, I; delta^n) of a base tuple.
    Syzygy(SyzygyArgs),
    /// Count solutions of the Vinogradov system.
    Vino(VinoArgs),
    /// Tabulate explicit constants.
    Bounds(BoundsArgs),
    /// Weighted L^{2n} norms of the extension operator and the square function.
    Ratio(RatioArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Padic,
    Real,
    Complex,
}

#[derive(Args, Debug)]
pub struct SyzygyArgs {
    #[arg(long, value_enum, default_value = "padic")]
    pub field: FieldArg,
    /// Prime for the p-adic field.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: usize,
    /// p-adic scale exponent, delta = p^{-s}.
    #[arg(long)]
    pub s: Option<u32>,
    /// Real scale, delta = 1/r.
    #[arg(long)]
    pub r: Option<u64>,
    /// Comma-separated cell indices of the base tuple.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tuple: Vec<u64>,
    /// Real sampling step as a rational (default delta/8).
    #[arg(long)]
    pub grid_step: Option<String>,
    /// Real tolerance as a rational (default delta^n).
    #[arg(long)]
    pub epsilon: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    HashJoin,
    BruteForce,
    PermutationFormula,
}

#[derive(Args, Debug)]
pub struct VinoArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "N", id = "big_n")]
    pub big_n: u64,
    #[arg(long, value_enum, default_value = "hash-join")]
    pub method: MethodArg,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// theorem1, syzygy, bezout, fewnomial, refined, lipschitz or wronskian.
    #[arg(long)]
    pub table: String,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "padic")]
    pub field: FieldArg,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FunctionArg {
    Random,
    One,
    Comb,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[arg(long, value_enum, default_value = "padic")]
    pub field: FieldArg,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    #[arg(long, default_value_t = 4)]
    pub r: u64,
    #[arg(long, value_enum, default_value = "random")]
    pub function: FunctionArg,
    /// First seed; sample k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    /// p-adic precision m of the test function (default s + 1).
    #[arg(long)]
    pub precision: Option<u32>,
    /// Real resolution M: atoms at a/M.
    #[arg(long, default_value_t = 16)]
    pub resolution: u64,
    /// Real midpoint points per unit length (default max(4, n + 1)).
    #[arg(long)]
    pub steps_per_unit: Option<u32>,
    /// Number of comb atoms.
    #[arg(long, default_value_t = 10)]
    pub atoms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    LocalField,
    Symmetric,
    Syzygy,
    Vinogradov,
    Extension,
    Bounds,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
