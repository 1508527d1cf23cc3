//! `que`: generate data, estimate robust means, score outliers, evaluate
//! scores and benchmark the estimator.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "que", version, about = "QUE outlier scoring and robust mean estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corrupted dataset.
    Gen(GenArgs),
    /// Estimate the mean of a corrupted dataset.
    Estimate(EstimateArgs),
    /// Score every sample of a dataset.
    Score(ScoreArgs),
    /// Compute the ROCAUC of scores against labels.
    Eval(EvalArgs),
    /// Time the estimation pipeline over a list of sample sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AdversaryArg {
    DirectionalMixture,
    #[value(alias = "directional")]
    ReplaceRemove,
    NormInflation,
    MultiDirection,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: f64,
    /// Number of corruption directions.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "directional-mixture")]
    adversary: AdversaryArg,
    /// Cluster distance multiplier C for the mixture adversary.
    #[arg(long, default_value_t = 1.0)]
    magnitude: f64,
    /// Outlier cluster spread for the mixture adversary.
    #[arg(long, default_value_t = 0.2)]
    sigma: f64,
    #[arg(long)]
    seed: u64,
    /// Output path; `.bin`/`.qued` selects the binary format. Defaults to stdout CSV.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long)]
    labels_out: Option<std::path::PathBuf>,
    /// Writes the true mean as one CSV row.
    #[arg(long)]
    mean_out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    BoundedCov,
    Subgaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleArg {
    Exact,
    Sketched,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    input: std::path::PathBuf,
    /// Skip the first line of CSV input.
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, default_value = "bounded-cov")]
    mode: ModeArg,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, value_enum, default_value = "sketched")]
    oracle: OracleArg,
    /// Required together with --json-out.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    json_out: Option<std::path::PathBuf>,
    /// Write a run record (config, seed, metrics, timings) as JSON.
    #[arg(long)]
    record_out: Option<std::path::PathBuf>,
    /// True mean (one CSV row); adds the error norm to the record.
    #[arg(long)]
    true_mean: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Que,
    L2,
    Spectral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExponentArg {
    /// Divide the exponent by the top eigenvalue of the covariance.
    Normalized,
    Raw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PowerArg {
    InvSqrt,
    Inv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    input: std::path::PathBuf,
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, default_value = "que")]
    method: MethodArg,
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// Chebyshev + sketch fast path instead of eigendecomposition.
    #[arg(long)]
    approx: bool,
    #[arg(long, value_enum, default_value = "normalized")]
    exponent: ExponentArg,
    /// `none`, `exact` or `topk:<k>`.
    #[arg(long, default_value = "none")]
    whiten: String,
    /// Reference data for the whitening fit; defaults to the input.
    #[arg(long)]
    whiten_ref: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "inv-sqrt")]
    whiten_power: PowerArg,
    #[arg(long, default_value_t = 1e-6)]
    ridge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TiesArg {
    Half,
    Geq,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    scores: std::path::PathBuf,
    #[arg(long)]
    labels: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "half")]
    ties: TiesArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    d: usize,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n_list: Vec<usize>,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "sketched")]
    oracle: OracleArg,
    #[arg(long, value_enum, default_value = "bounded-cov")]
    mode: ModeArg,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = io::check_thread_env() {
        eprintln!("error: {err}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Score(a) => commands::score(a),
        Command::Eval(a) => commands::eval(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<io::UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
