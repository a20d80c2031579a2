use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 20_231_117;

#[derive(Parser, Debug)]
#[command(
    name = "occupancy",
    version,
    about = "Probabilities that a random subset hits every block, or that every bin gets a minimum load"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Probability of the occupancy event by one or more methods.
    Prob {
        #[command(subcommand)]
        model: ProbModel,
    },
    /// Smallest subset size whose limiting probability reaches a target.
    Threshold(ThresholdArgs),
    /// Finite-size diagnostics for the limit theorems.
    Validity(ValidityArgs),
    /// Evaluate a grid over one parameter.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
pub enum ProbModel {
    /// Uniform K-subset of {1..N}, blocks of length S, at least R hits each.
    Subset {
        #[command(flatten)]
        params: SubsetArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// m balls into n bins, at least R balls per bin.
    Bins {
        #[command(flatten)]
        params: BinsArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SubsetArgs {
    #[arg(long = "N")]
    pub universe: u64,
    #[arg(long = "S")]
    pub block_len: u64,
    #[arg(long = "K")]
    pub subset_size: u64,
    #[arg(long = "R")]
    pub min_hits: u64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BinsArgs {
    #[arg(long = "m")]
    pub balls: u64,
    #[arg(long = "n")]
    pub bins: u64,
    #[arg(long = "R")]
    pub min_load: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Exact,
    Bonferroni,
    Asymptotic,
    Mc,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArithmeticArg {
    #[default]
    Auto,
    Exact,
    Log,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Leave runtime_ms empty so repeated runs print identical bytes.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Comma-separated list; `all` runs every feasible method.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "exact")]
    pub method: Vec<MethodArg>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for simulation; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Truncate the inclusion/exclusion expansion after this many terms.
    #[arg(long)]
    pub max_terms: Option<usize>,
    #[arg(long, value_enum, default_value_t = ArithmeticArg::Auto)]
    pub arithmetic: ArithmeticArg,
    /// Largest solver cost attempted at all.
    #[arg(long, default_value_t = 2_000_000_000)]
    pub budget: u128,
    /// Largest solver cost run in exact rationals under `--arithmetic auto`.
    #[arg(long, default_value_t = 50_000_000)]
    pub exact_budget: u128,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ThresholdArgs {
    #[arg(long = "N")]
    pub universe: u64,
    #[arg(long = "S")]
    pub block_len: u64,
    #[arg(long = "R")]
    pub min_hits: u64,
    #[arg(long)]
    pub target_prob: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ValidityArgs {
    #[arg(long = "N")]
    pub universe: Option<u64>,
    #[arg(long = "S")]
    pub block_len: Option<u64>,
    #[arg(long = "K")]
    pub subset_size: Option<u64>,
    #[arg(long = "m")]
    pub balls: Option<u64>,
    #[arg(long = "n")]
    pub bins: Option<u64>,
    #[arg(long = "R")]
    pub min_hits: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    #[value(name = "N")]
    Universe,
    #[value(name = "S")]
    BlockLen,
    #[value(name = "K")]
    SubsetSize,
    #[value(name = "R")]
    MinHits,
    #[value(name = "m")]
    Balls,
    #[value(name = "n")]
    Bins,
    /// Shift of the size away from the c = 1 point, in units of N/S.
    #[value(name = "a")]
    Shift,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub vary: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long = "N")]
    pub universe: Option<u64>,
    #[arg(long = "S")]
    pub block_len: Option<u64>,
    #[arg(long = "K")]
    pub subset_size: Option<u64>,
    #[arg(long = "m")]
    pub balls: Option<u64>,
    #[arg(long = "n")]
    pub bins: Option<u64>,
    #[arg(long = "R")]
    pub min_hits: Option<u64>,
    #[command(flatten)]
    pub run: RunArgs,
}
