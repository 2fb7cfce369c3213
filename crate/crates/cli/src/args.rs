use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Two-sample test based on maximal precedence and maximal exceedance.
#[derive(Debug, Parser, Serialize)]
#[command(name = "maxprec", version, about)]
pub struct Cli {
    /// Seed for randomized decisions and simulations.
    #[arg(long, global = true, help_heading = "Global options", default_value_t = 20240501)]
    pub seed: u64,

    /// Monte-Carlo replicates.
    #[arg(long, global = true, help_heading = "Global options", default_value_t = 100_000)]
    pub reps: u64,

    /// Significance level.
    #[arg(long, global = true, help_heading = "Global options", default_value_t = 0.05)]
    pub alpha: f64,

    #[arg(long, global = true, help_heading = "Global options", value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; standard output when absent.
    #[arg(long, global = true, help_heading = "Global options")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Run the test on two samples.
    Test(TestArgs),
    /// Print the exact null distribution of T.
    NullDist(NullDistArgs),
    /// Critical values over a grid of designs.
    CriticalValues(CriticalArgs),
    /// Power of the test against Lehmann, exponential or Weibull alternatives.
    Power(PowerArgs),
    /// Power of the T, V and Q tests side by side.
    Compare(PowerArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    /// File with the training (X) sample, one group per file.
    #[arg(long, requires = "test", conflicts_with = "input")]
    pub training: Option<PathBuf>,

    /// File with the test (Y) sample.
    #[arg(long, requires = "training", conflicts_with = "input")]
    pub test: Option<PathBuf>,

    /// Two-column file with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Column of `--input` holding the training sample (header name or 1-based index).
    #[arg(long, default_value = "1")]
    pub training_col: String,

    /// Column of `--input` holding the test sample (header name or 1-based index).
    #[arg(long, default_value = "2")]
    pub test_col: String,

    #[command(flatten)]
    pub orders: OrderArgs,
}

/// Cell orders, given directly or as rates `r = floor(rho * n) + 1`.
#[derive(Debug, Args, Serialize)]
pub struct OrderArgs {
    /// Precedence orders; several values give one row each.
    #[arg(long, value_delimiter = ',', conflicts_with = "rho1")]
    pub r: Vec<usize>,

    /// Exceedance orders; every `--r` is combined with every `--s`. Defaults to `s = r`.
    #[arg(long, value_delimiter = ',', conflicts_with = "rho2")]
    pub s: Vec<usize>,

    /// Precedence rate.
    #[arg(long)]
    pub rho1: Option<String>,

    /// Exceedance rate; defaults to `--rho1`.
    #[arg(long)]
    pub rho2: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct NullDistArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub s: usize,
    /// How the distribution is obtained.
    #[arg(long, value_enum, default_value_t = NullMethod::Exact)]
    pub method: NullMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullMethod {
    Exact,
    /// Walk every placement; small designs only.
    BruteForce,
}

#[derive(Debug, Args, Serialize)]
pub struct CriticalArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Precedence orders (combined with every `--s`).
    #[arg(long, value_delimiter = ',', required_unless_present = "rho")]
    pub r: Vec<usize>,
    /// Exceedance orders; defaults to `r = s`.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<usize>,
    /// Rates giving `r = s = floor(rho * n) + 1`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r", "s"])]
    pub rho: Vec<String>,
    #[arg(long, value_enum, default_value_t = CriticalMode::Exact)]
    pub method: CriticalMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalMode {
    Exact,
    Mc,
}

#[derive(Debug, Args, Serialize)]
pub struct PowerArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    /// Test-sample sizes; defaults to `--m`.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<usize>,
    /// Exceedance orders; every `--r` is combined with every `--s`. Defaults to `s = r`.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<usize>,
    /// Varied parameter: gamma, rate or scale. Fractions such as `1/5` are
    /// accepted.
    #[arg(long = "gamma", visible_aliases = ["rate", "scale"], value_delimiter = ',', required = true)]
    pub parameter: Vec<String>,
    #[arg(long, value_enum, default_value_t = Family::Lehmann)]
    pub alternative: Family,
    /// Weibull shape.
    #[arg(long, default_value_t = 1.0)]
    pub shape: f64,
    /// Baseline distribution for Lehmann sampling.
    #[arg(long, value_enum, default_value_t = BaselineArg::Uniform)]
    pub baseline: BaselineArg,
    /// Group carrying the varied parameter.
    #[arg(long, value_enum, default_value_t = VariedArg::Test)]
    pub vary: VariedArg,
    /// Statistics to evaluate; `compare` defaults to T,V,Q.
    #[arg(long, value_delimiter = ',')]
    pub statistic: Vec<String>,
    #[arg(long, value_enum, default_value_t = PowerMethod::Mc)]
    pub method: PowerMethod,
    /// Work budget for the exact method.
    #[arg(long, default_value_t = maxprec::lehmann::DEFAULT_BUDGET)]
    pub budget: f64,
    /// Also write one `parameter,power` file per design and statistic here.
    #[arg(long)]
    pub curves_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lehmann,
    Exponential,
    Weibull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineArg {
    Uniform,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariedArg {
    Test,
    Training,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerMethod {
    Exact,
    Mc,
}
