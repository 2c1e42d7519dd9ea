mod commands;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::run;

#[derive(Parser, Debug, Serialize)]
#[command(name = "consensus-lab", version)]
#[command(about = "Stability and critical network size of n-th order consensus")]
pub struct Cli {
    /// Output directory for CSV/JSON artifacts and the run manifest
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Laplacian spectrum, structural facts and optional bound certificates
    Spectrum(SpectrumArgs),
    /// Routh–Hurwitz stability verdict for one graph and gain vector
    Stability(StabilityArgs),
    /// Sweep network size to find where fixed gains stop stabilizing
    CriticalN(CriticalArgs),
    /// Integrate the closed loop and classify the trajectory
    Simulate(SimulateArgs),
    /// Algebraic-connectivity bound certificates
    Bounds(BoundsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GraphArgs {
    /// Graph family: path_fuzz, cycle, directed_cycle, toric_lattice,
    /// delaunay_planar, tree_path, star_tree, complete
    #[arg(long)]
    pub family: Option<String>,

    /// Number of agents
    #[arg(long = "N")]
    pub nodes: Option<usize>,

    /// Neighborhood size of path_fuzz (even; a list for critical-n)
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub q: Vec<usize>,

    /// Neighbors per direction on a toric lattice
    #[arg(long, default_value_t = 1)]
    pub r: usize,

    /// Lattice dimension
    #[arg(long, default_value_t = 1)]
    pub d: usize,

    /// Uniform edge weight
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,

    /// Seed for random families and initial conditions
    #[arg(long, env = "CONSENSUS_LAB_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Edge-list file (`directed|undirected N` header, then `i j w`, 1-based)
    #[arg(long, conflicts_with = "family")]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ModeArgs {
    #[arg(long, value_enum, default_value = "leaderless")]
    pub mode: ModeFlag,

    /// Leader agent, 1-based
    #[arg(long, default_value_t = 1)]
    pub leader: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFlag {
    Leaderless,
    Leader,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    /// Also report λ₂ of the mirror graph
    #[arg(long)]
    pub mirror: bool,

    /// Bound certificates to evaluate: fuzz, planar, genus, tree, leader
    #[arg(long, value_delimiter = ',')]
    pub bounds: Vec<String>,

    /// Constant for the genus bound
    #[arg(long)]
    pub c2: Option<f64>,

    /// Leader for the grounded bound, 1-based
    #[arg(long, default_value_t = 1)]
    pub leader: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub mode: ModeArgs,

    /// Order of the integrator chain
    #[arg(long = "n")]
    pub order: usize,

    /// Gains a0,a1,...,a_{n-1}
    #[arg(
        long = "a",
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub gains: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub mode: ModeArgs,

    /// Orders to sweep; each uses the first n gains
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub orders: Vec<usize>,

    /// Gains a0,a1,...; exactly max(n) values
    #[arg(
        long = "a",
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub gains: Vec<f64>,

    #[arg(long = "Nmin", default_value_t = 2)]
    pub n_min: usize,

    #[arg(long = "Nmax", default_value_t = 100)]
    pub n_max: usize,

    #[arg(long, default_value_t = 1)]
    pub step: usize,

    /// Worker threads; output does not depend on this
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub mode: ModeArgs,

    #[arg(long = "n")]
    pub order: usize,

    #[arg(
        long = "a",
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub gains: Vec<f64>,

    /// RK4 step
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,

    /// Horizon
    #[arg(long = "T", default_value_t = 200.0)]
    pub horizon: f64,

    /// Half-width of the uniform initial accelerations
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    /// Keep every k-th step in the trace
    #[arg(long, default_value_t = 10)]
    pub stride: usize,

    /// Also write trace.bin (little-endian f64 layout, see README)
    #[arg(long)]
    pub binary: bool,

    /// Record agreement with the analytic verdict in the manifest
    #[arg(long)]
    pub compare_stability: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    /// Bound certificates to evaluate: fuzz, planar, genus, tree, leader
    #[arg(long, value_delimiter = ',', required = true)]
    pub bounds: Vec<String>,

    #[arg(long)]
    pub c2: Option<f64>,

    #[arg(long, default_value_t = 1)]
    pub leader: usize,
}
