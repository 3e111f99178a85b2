//! `msflab`: generate graphs, sample minimal spanning forests, run invasions,
//! compute exact tree laws, build plane duals, gather statistics and run the
//! acceptance suite.

mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] msflab::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "msflab", version, about = "Minimal spanning forest experiments")]
struct Cli {
    /// Where to write the run manifest. Defaults to `<out>.manifest.json`
    /// when the command writes to a file.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a graph file.
    Generate(GenerateArgs),
    /// Free and wired minimal spanning forests with their Z values.
    Forest(ForestArgs),
    /// Invasion tree or basin from a vertex.
    Invade(InvadeArgs),
    /// Exact tree probabilities.
    Exact(ExactArgs),
    /// Plane dual of an embedded graph.
    Dual(DualArgs),
    /// Monte Carlo statistics.
    Stats(StatsArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
#[group(id = "shape", required = true, multiple = false)]
pub struct ShapeArgs {
    /// Box [0, SIDE)^DIM with nearest-neighbour edges.
    #[arg(long, num_args = 2, value_names = ["DIM", "SIDE"], group = "shape")]
    pub grid: Option<Vec<usize>>,
    /// Two strips of width W and height H joined at --slits columns.
    #[arg(long, num_args = 2, value_names = ["W", "H"], group = "shape")]
    pub strip: Option<Vec<usize>>,
    /// Lattice ball of radius R in DIM dimensions.
    #[arg(long, num_args = 2, value_names = ["DIM", "R"], group = "shape")]
    pub ball: Option<Vec<usize>>,
    /// Uniform random multigraph with N vertices and M edges.
    #[arg(long, num_args = 2, value_names = ["N", "M"], group = "shape")]
    pub random: Option<Vec<usize>>,
    /// Complete graph on N vertices.
    #[arg(long, value_name = "N", group = "shape")]
    pub complete: Option<usize>,
    /// Four vertices, all six edges, two disjoint edges tripled.
    #[arg(long, group = "shape")]
    pub correlation_example: bool,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Wrap grid coordinates.
    #[arg(long)]
    pub torus: bool,
    /// Junction columns for --strip.
    #[arg(long, value_delimiter = ',')]
    pub slits: Vec<usize>,
    /// Make --random connected.
    #[arg(long)]
    pub connected: bool,
    /// Seed for --random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include a plane rotation system (2-D free grids only).
    #[arg(long)]
    pub embed: bool,
    /// Write labels sampled with this seed.
    #[arg(long, value_name = "SEED")]
    pub label_seed: Option<u64>,
    /// Write sampled labels as exact `p/q` dyadic rationals.
    #[arg(long, requires = "label_seed")]
    pub exact_labels: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Sample labels with this seed. Without it the file's labels are used,
    /// or seed 0 if the file has none.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Boundary to wire: a tag name in the graph file or a vertex list file.
    /// Defaults to the `boundary` tag when present.
    #[arg(long, value_name = "TAG|FILE")]
    pub boundary: Option<String>,
    /// Ignore any boundary, including the default tag.
    #[arg(long, conflicts_with = "boundary")]
    pub no_boundary: bool,
}

#[derive(Args, Debug)]
pub struct ForestArgs {
    #[command(flatten)]
    pub input: LabelArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InvadeArgs {
    #[command(flatten)]
    pub input: LabelArgs,
    #[arg(long)]
    pub source: usize,
    /// Grow the basin (any least incident edge) instead of the tree.
    #[arg(long)]
    pub basin: bool,
    /// Stop after this many accepted edges.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Probability of one spanning tree, as comma-separated edge ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "all")]
    pub tree: Option<Vec<usize>>,
    /// Full catalog with classes and pairwise edge correlations.
    #[arg(long)]
    pub all: bool,
    /// Restrict correlations to this pair.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub pair: Option<Vec<usize>>,
    /// Cross-check every probability against the ordering oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Search for a tree whose law changes when an edge is deleted.
    #[arg(long)]
    pub exhibit: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DualArgs {
    /// Graph file with a rotation block.
    #[arg(long)]
    pub graph: PathBuf,
    /// Where to write the dual graph file.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the edge bijection table; stdout by default.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Also check tree duality under labels sampled with this seed.
    #[arg(long)]
    pub verify_seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(subcommand)]
    pub kind: StatsKind,
}

#[derive(Args, Debug)]
pub struct TrialArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GraphBoundary {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_name = "TAG|FILE")]
    pub boundary: Option<String>,
    #[arg(long, conflicts_with = "boundary")]
    pub no_boundary: bool,
}

#[derive(Subcommand, Debug)]
pub enum StatsKind {
    /// Per-trial tree size, component count, mean degree and free/wired gap.
    Degree {
        #[command(flatten)]
        g: GraphBoundary,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Pooled coupling residuals with a uniformity test.
    Residuals {
        #[command(flatten)]
        g: GraphBoundary,
        #[arg(long, value_enum)]
        context: ResidualKind,
        /// Kolmogorov-Smirnov level.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Face-to-face cluster counts and gap frequency on a free box.
    Scan {
        #[arg(long, num_args = 2, value_names = ["DIM", "SIDE"])]
        grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        p_grid: Vec<f64>,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Largest Bernoulli-open cluster inside a sampled wired forest.
    Probe {
        #[command(flatten)]
        g: GraphBoundary,
        #[arg(long, value_delimiter = ',', required = true)]
        p_grid: Vec<f64>,
        /// Seed of the forest's labels.
        #[arg(long, default_value_t = 0)]
        forest_seed: u64,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Connectivity of the xi configuration.
    Xi {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Per-edge law of tree-plus-noise against xi.
    Law {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Probability that the invasion basins of the sources are disjoint.
    Disjoint {
        #[command(flatten)]
        g: GraphBoundary,
        #[arg(long, value_delimiter = ',', required = true)]
        sources: Vec<usize>,
        #[command(flatten)]
        t: TrialArgs,
    },
    /// Free and wired trees along nested lattice boxes.
    Exhaustion {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
        radii: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        window: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ResidualKind {
    Free,
    Wired,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Earlier JSON report to compare against.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("MSFLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("MSFLAB_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let result = configure_threads().and_then(|_| commands::dispatch(cli.command, args, cli.manifest));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("msflab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
