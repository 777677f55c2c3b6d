//! `transect`: GP-based informative path planning over transect grids.
//!
//! Subcommands: `gen` (synthesize a field file), `plan` (run a planner and
//! write a path file plus report), `eval` (score a path file against a
//! field), `bound` (evaluate the planners' loss bounds), `bench` (timing
//! and work-counter sweeps).
//!
//! Exit codes: 0 success, 2 usage error, 3 budget refusal, 4 numerical
//! failure, 5 I/O or parse failure. `TRANSECT_THREADS` caps internal
//! parallelism (0 or unset = automatic).

mod cmds;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use transect_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "transect",
    version,
    about = "Informative path planning for multi-robot transect sampling",
    after_help = "Exit codes: 0 ok, 2 usage, 3 budget refusal, 4 numerical failure, 5 I/O.\n\
                  Env: TRANSECT_THREADS caps internal parallelism (0 = auto),\n\
                  SOURCE_DATE_EPOCH pins report timestamps."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a synthetic field from a seeded Gaussian process and write
    /// it as a field file.
    Gen(GenArgs),
    /// Plan an observation path and write it as a path file plus a report.
    Plan(PlanArgs),
    /// Evaluate the EN/MI/ER metrics of a path file against a field file.
    Eval(EvalArgs),
    /// Evaluate the windowed planners' worst-case loss bounds.
    Bound(BoundArgs),
    /// Run timing or work-counter sweeps over algorithms and orders.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Rows per column (r).
    #[arg(long)]
    rows: Option<usize>,
    /// Number of columns (n).
    #[arg(long)]
    cols: Option<usize>,
    /// Horizontal spacing between columns, meters.
    #[arg(long, default_value_t = 1.0)]
    spacing_h: f64,
    /// Vertical spacing between rows, meters.
    #[arg(long, default_value_t = 1.0)]
    spacing_v: f64,
}

#[derive(Args)]
struct ParamArgs {
    /// Horizontal length-scale, meters.
    #[arg(long)]
    l1: Option<f64>,
    /// Vertical length-scale, meters.
    #[arg(long)]
    l2: Option<f64>,
    /// Signal variance.
    #[arg(long)]
    sig2: Option<f64>,
    /// Noise variance.
    #[arg(long)]
    noise2: Option<f64>,
    /// Constant prior mean (default 0; for the ER metric, defaults to the
    /// sample mean of the path's own measurements).
    #[arg(long)]
    mean: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Seed of the field generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output field file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    /// Algorithm: mepp, m2ipp, gmepp, gm2ipp, exact-mepp, exact-m2ipp.
    #[arg(long)]
    algo: String,
    /// Markov order (required for mepp and m2ipp).
    #[arg(long)]
    m: Option<usize>,
    /// Robots per column (k).
    #[arg(long)]
    robots: usize,
    /// Field file supplying the grid geometry (and measurements for the
    /// metrics block).
    #[arg(long)]
    field: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Fit hyperparameters to the field by maximum likelihood instead of
    /// taking them from flags (requires --field).
    #[arg(long)]
    fit: bool,
    /// Maximum permitted enumeration/table size, entries.
    #[arg(long, default_value_t = transect_core::planners::DEFAULT_BUDGET_GUARD)]
    budget_guard: u64,
    /// Output path file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Path file to score.
    #[arg(long)]
    path: PathBuf,
    /// Field file with the grid and ground-truth measurements.
    #[arg(long)]
    field: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct BoundArgs {
    /// Robots per column (k).
    #[arg(long)]
    robots: usize,
    /// Rows per column (r).
    #[arg(long)]
    rows: usize,
    /// Planning horizon (n).
    #[arg(long)]
    cols: usize,
    /// Markov order (m).
    #[arg(long)]
    m: usize,
    /// Normalized horizontal length-scale l1 / spacing_h.
    #[arg(long)]
    lengthscale_norm: f64,
    /// Noise-to-signal variance ratio.
    #[arg(long)]
    eta: f64,
    /// Restrict the report to one bound: mepp or m2ipp (default: both).
    #[arg(long)]
    algo: Option<String>,
    /// Sweep m = 1..=SWEEP_MAX and write a two-column data file
    /// (requires --algo and --out).
    #[arg(long)]
    sweep_max: Option<usize>,
    /// Output data file for the sweep.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated algorithm list.
    #[arg(long)]
    algos: String,
    /// Smallest Markov order to sweep.
    #[arg(long, default_value_t = 1)]
    m_min: usize,
    /// Largest Markov order to sweep.
    #[arg(long, default_value_t = 1)]
    m_max: usize,
    /// Repetitions per configuration (median is reported).
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Robots per column (k).
    #[arg(long)]
    robots: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// What to record: `time` (median wall seconds), `work` (deterministic
    /// factorization units), or `evals` (information-term requests).
    #[arg(long, default_value = "time")]
    measure: String,
    /// Maximum permitted enumeration/table size, entries.
    #[arg(long, default_value_t = transect_core::planners::DEFAULT_BUDGET_GUARD)]
    budget_guard: u64,
    /// Output data file.
    #[arg(long)]
    out: PathBuf,
}

/// Errors at the command layer: either a usage problem of our own or a
/// library error carrying its class.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(CoreError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Usage(_) => 2,
        CliError::Core(err) => match err {
            CoreError::BudgetExceeded { .. } | CoreError::TooLarge { .. } => 3,
            CoreError::SingularSystem { .. }
            | CoreError::DegenerateNoise
            | CoreError::ZeroMeanField
            | CoreError::SearchFailed => 4,
            CoreError::Io(_) | CoreError::Parse { .. } => 5,
            _ => 2,
        },
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("TRANSECT_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() {
    env_logger::init();
    configure_threads();
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Gen(args) => cmds::gen(args),
        Cmd::Plan(args) => cmds::plan(args),
        Cmd::Eval(args) => cmds::eval(args),
        Cmd::Bound(args) => cmds::bound(args),
        Cmd::Bench(args) => cmds::bench(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
