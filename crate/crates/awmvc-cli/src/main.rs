//! `awmvc`: generate synthetic multi-view data, fit the auto-weighted
//! clustering pipeline, evaluate label files, and benchmark scaling.
//!
//! Exit codes: 0 success, 2 usage, 3 data validation, 4 numeric failure,
//! 5 i/o.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};

use awmvc::solver::{AlphaRule, Variant};

#[derive(Parser)]
#[command(name = "awmvc", version, about = "Auto-weighted multi-view clustering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-view dataset directory.
    Gen(GenArgs),
    /// Fit the pipeline on a dataset directory and emit a JSON report.
    Run(RunArgs),
    /// Score a predicted label file against a ground-truth label file.
    Eval(EvalArgs),
    /// Time fitting (and k-means separately) across dataset sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Sample count.
    #[arg(long)]
    n: usize,
    /// Number of views.
    #[arg(long, default_value_t = 3)]
    views: usize,
    /// Number of planted clusters.
    #[arg(long)]
    clusters: usize,
    /// Latent space dimension.
    #[arg(long, default_value_t = 20)]
    latent_dim: usize,
    /// Per-view feature dimensions (comma separated). Defaults to
    /// 30 + 10*(views-1-v) per view, e.g. 50,40,30 for three views.
    #[arg(long, value_delimiter = ',')]
    view_dims: Option<Vec<usize>>,
    /// Standard deviation of latent and observation noise.
    #[arg(long, default_value_t = 0.1)]
    noise_sigma: f64,
    /// Scale of the cluster centers in latent space.
    #[arg(long, default_value_t = 5.0)]
    center_spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Payload encoding for the view files.
    #[arg(long, value_enum, default_value_t = FormatArg::Bin)]
    format: FormatArg,
    /// Dataset name recorded in meta.json.
    #[arg(long, default_value = "synthetic")]
    name: String,
    /// Output directory.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Dataset directory (as written by `gen` or a converter).
    #[arg(long)]
    data: std::path::PathBuf,
    /// Cluster count; taken from the labels when omitted.
    #[arg(long)]
    clusters: Option<usize>,
    /// Number of embedding dimensions (ignored by --variant fixed-dim).
    #[arg(long)]
    m: Option<usize>,
    /// Embedding dimensions (comma separated); defaults to k,2k,...,mk.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = AlphaRuleArg::Paper)]
    alpha_rule: AlphaRuleArg,
    #[arg(long, default_value_t = 50)]
    kmeans_restarts: usize,
    /// Re-cluster the consensus every sweep and add an acc_of_m column to
    /// the trace (requires labels; multiplies cost by the k-means budget).
    #[arg(long)]
    trace_evolution: bool,
    #[arg(long, value_enum, default_value_t = NormalizeArg::None)]
    normalize: NormalizeArg,
    /// Also write the JSON report to this path.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    /// Write a per-iteration CSV trace to this path.
    #[arg(long)]
    trace: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted labels, one integer per line.
    #[arg(long)]
    pred: std::path::PathBuf,
    /// Ground-truth labels, one integer per line.
    #[arg(long)]
    truth: std::path::PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Sample counts to benchmark, in the order given.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    views: usize,
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 20)]
    latent_dim: usize,
    #[arg(long, value_delimiter = ',')]
    view_dims: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.1)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 5.0)]
    center_spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweeps to run per size (the tolerance is disabled so every row
    /// times the same number of sweeps).
    #[arg(long, default_value_t = 5)]
    iters: usize,
    #[arg(long, default_value_t = 50)]
    kmeans_restarts: usize,
    /// Also write the CSV to this path.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Bin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Full,
    FixedDim,
    EqualAlpha,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::FixedDim => Variant::FixedDim,
            VariantArg::EqualAlpha => Variant::EqualAlpha,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlphaRuleArg {
    Paper,
    Kkt,
}

impl From<AlphaRuleArg> for AlphaRule {
    fn from(v: AlphaRuleArg) -> Self {
        match v {
            AlphaRuleArg::Paper => AlphaRule::Reciprocal,
            AlphaRuleArg::Kkt => AlphaRule::Kkt,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormalizeArg {
    None,
    PerSampleL2,
}

fn exit_code(err: &awmvc::Error) -> i32 {
    match err {
        awmvc::Error::Validation(_) => 3,
        awmvc::Error::Numeric(_) => 4,
        awmvc::Error::Io(_) => 5,
    }
}

fn configure_threads() -> Result<(), awmvc::Error> {
    if let Ok(raw) = std::env::var("AWMVC_THREADS") {
        let threads: usize = raw.parse().map_err(|_| {
            awmvc::Error::validation(format!("AWMVC_THREADS must be a positive integer, got '{raw}'"))
        })?;
        if threads == 0 {
            return Err(awmvc::Error::validation("AWMVC_THREADS must be positive"));
        }
        // Ignore "already initialized": the pool can only be set once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Run(args) => commands::run(args),
        Command::Eval(args) => commands::eval(args),
        Command::Bench(args) => commands::bench(args),
    });
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
