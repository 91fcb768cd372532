use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("MRPS_COMMIT"), ")");
pub const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\ncommit: ",
    env!("MRPS_COMMIT"),
    "\nprofile: ",
    env!("MRPS_BUILD_PROFILE"),
    "\ntarget: ",
    env!("MRPS_BUILD_TARGET"),
);

/// Multi-robot parcel sorting toolkit.
///
/// Every file a subcommand writes lands inside the output directory;
/// relative output paths are resolved against it and paths that escape it
/// are rejected.
#[derive(Debug, Parser)]
#[command(name = "mrps", version = VERSION, long_version = LONG_VERSION)]
pub struct Cli {
    /// Directory that receives every output file.
    #[arg(long, global = true, env = "MRPS_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    /// Global seed. A subcommand without its own `--seed` uses
    /// `derive_seed(global, "<subcommand>")`.
    #[arg(long = "seed", value_name = "SEED")]
    pub global_seed: Option<u64>,

    /// More log output; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a block warehouse map.
    GenMap(GenMapArgs),
    /// Draw a random station-by-type distribution for a map.
    GenDist(GenDistArgs),
    /// Assign parcel types to bins.
    Assign(AssignArgs),
    /// Run the lifelong pickup-and-delivery simulation.
    Simulate(SimulateArgs),
    /// Run a preset or custom experiment.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct GenMapArgs {
    #[arg(long, default_value_t = 1)]
    pub block_rows: usize,
    #[arg(long, default_value_t = 1)]
    pub block_cols: usize,
    /// Stations spread evenly along the border.
    #[arg(long, default_value_t = 1)]
    pub stations: usize,
    #[arg(long, default_value = "map.txt")]
    pub out: PathBuf,
    /// Also write the road network as an arrow grid.
    #[arg(long)]
    pub arrows: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDistArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Number of parcel types.
    #[arg(long)]
    pub types: usize,
    /// Rows drawn from a flat Dirichlet; `--uniform` gives equal rows instead.
    #[arg(long)]
    pub uniform: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "dist.txt")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub dist: PathBuf,
    /// random, hungarian, greedy, ga or exact.
    #[arg(long, default_value = "ga")]
    pub solver: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 800)]
    pub ga_iters: usize,
    #[arg(long, default_value_t = 100)]
    pub ga_pop: usize,
    #[arg(long, default_value_t = 0.08)]
    pub ga_mutation: f64,
    /// Exact-solver budget in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long, default_value = "assignment.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub dist: PathBuf,
    /// Report written by `assign`, or whitespace-separated 1-based types.
    #[arg(long)]
    pub assignment: PathBuf,
    #[arg(long)]
    pub robots: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Steps left out of the delivery count.
    #[arg(long, default_value_t = 0)]
    pub warmup: usize,
    /// pry, epry-random or epry-focal.
    #[arg(long, default_value = "epry-focal")]
    pub planner: String,
    #[arg(long, default_value_t = 1.5)]
    pub focal_w: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "metrics.json")]
    pub out: PathBuf,
    /// Per-step robot positions as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// fig5, fig6, fig7, fig8 or a JSON experiment file.
    #[arg(long)]
    pub experiment: String,
    /// Seeds per point.
    #[arg(long)]
    pub seeds: Option<usize>,
}
