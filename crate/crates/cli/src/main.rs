use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;

/// Anonymous walk embeddings of whole graphs.
#[derive(Parser, Debug)]
#[command(name = "awe", version, about)]
struct Cli {
    /// Worker threads. With 1 every stage is bit-reproducible; the other
    /// deterministic stages are reproducible for any count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every anonymous walk of length l, one per line.
    Enumerate(EnumerateArgs),
    /// Feature-based embeddings: anonymous walk distributions.
    EmbedFb(EmbedFbArgs),
    /// Data-driven embeddings trained from co-occurring walks.
    EmbedDd(EmbedDdArgs),
    /// Kernel SVM accuracy under repeated stratified cross-validation.
    Classify(ClassifyArgs),
    /// Time data-driven embedding of Erdős–Rényi graphs.
    Scalability(ScalabilityArgs),
}

#[derive(Args, Debug)]
pub struct DatasetArgs {
    /// Dataset directory, looked up under $AWE_DATA_DIR when relative and
    /// not found.
    #[arg(long)]
    pub dataset: PathBuf,

    /// auto, benchmark (DS_A.txt, DS_graph_indicator.txt, ...) or edge-list.
    #[arg(long, default_value = "auto")]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    /// Walk length in edges.
    #[arg(long = "l")]
    pub length: usize,

    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EmbedFbArgs {
    #[command(flatten)]
    pub data: DatasetArgs,

    /// Walk lengths, comma separated.
    #[arg(long = "l", value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
    pub lengths: Vec<usize>,

    /// exact or sampled.
    #[arg(long, default_value = "sampled")]
    pub mode: String,

    /// L1 error bound of the sampled distribution.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,

    /// Failure probability of the bound.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,

    /// Walks per graph, overriding the (eps, delta) bound.
    #[arg(long)]
    pub samples: Option<u64>,

    /// Largest number of walks exact mode may enumerate per graph.
    #[arg(long, default_value_t = awe::feature::DEFAULT_WALK_BUDGET)]
    pub budget: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    /// Walk length in edges.
    #[arg(long = "l", default_value_t = 10)]
    pub length: usize,

    /// Walks sampled from every node (T).
    #[arg(long, default_value_t = 20)]
    pub walks_per_node: usize,

    /// Context half-width.
    #[arg(long, default_value_t = 4)]
    pub window: usize,

    #[arg(long, default_value_t = 100)]
    pub batch: usize,

    #[arg(long, default_value_t = 100)]
    pub epochs: usize,

    /// Batch steps per epoch.
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,

    /// Walk vector size d_a.
    #[arg(long, default_value_t = 128)]
    pub walk_dim: usize,

    /// Graph vector size d_g.
    #[arg(long, default_value_t = 128)]
    pub graph_dim: usize,

    /// full or sampled.
    #[arg(long, default_value = "sampled")]
    pub softmax: String,

    /// Negative candidates per example in sampled softmax.
    #[arg(long, default_value_t = 5)]
    pub candidates: usize,

    /// uniform or loguniform.
    #[arg(long, default_value = "uniform")]
    pub sampler: String,

    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,

    /// Learning rate at the last step (linear decay).
    #[arg(long, default_value_t = 1e-4)]
    pub final_lr: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EmbedDdArgs {
    #[command(flatten)]
    pub data: DatasetArgs,

    #[command(flatten)]
    pub train: TrainArgs,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Embedding CSV files; each is one candidate for model selection.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub embeddings: Vec<PathBuf>,

    /// One label per line, in graph order.
    #[arg(long, conflicts_with = "dataset")]
    pub labels: Option<PathBuf>,

    /// Take labels from this dataset instead.
    #[arg(long)]
    pub dataset: Option<PathBuf>,

    #[arg(long, default_value = "auto")]
    pub format: String,

    /// Kernel families: inner, poly, rbf.
    #[arg(long = "kernel", value_delimiter = ',', default_value = "rbf")]
    pub kernels: Vec<String>,

    /// RBF widths.
    #[arg(long, value_delimiter = ',', default_value = "1e-5,1e-4,1e-3,1e-2,1e-1,1,10")]
    pub sigma: Vec<f64>,

    /// Polynomial kernel offset.
    #[arg(long, default_value_t = 0.0)]
    pub poly_c: f64,

    /// Polynomial kernel degree.
    #[arg(long, default_value_t = 2)]
    pub poly_degree: u32,

    /// SVM C values.
    #[arg(long = "c", value_delimiter = ',', default_value = "0.001,0.01,0.1,1,10")]
    pub c_grid: Vec<f64>,

    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = 10)]
    pub repeats: usize,

    /// Scale every embedding to unit length first.
    #[arg(long)]
    pub normalize: bool,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Report JSON file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ScalabilityArgs {
    /// Node counts.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,30000")]
    pub sizes: Vec<usize>,

    /// Expected degrees μ = n·p.
    #[arg(long = "mu", value_delimiter = ',', default_value = "2,3,4,5")]
    pub mus: Vec<f64>,

    /// Graphs per (n, μ) cell.
    #[arg(long, default_value_t = 10)]
    pub reps: usize,

    #[arg(long = "l", default_value_t = 10)]
    pub length: usize,

    #[arg(long, default_value_t = 201)]
    pub walks_per_node: usize,

    #[arg(long, default_value_t = 100)]
    pub window: usize,

    #[arg(long, default_value_t = 100)]
    pub batch: usize,

    #[arg(long, default_value_t = 1)]
    pub epochs: usize,

    #[arg(long, default_value_t = 100)]
    pub iterations: usize,

    /// Walk and graph vector size.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }

    let result = match cli.command {
        Command::Enumerate(a) => commands::enumerate(a, cli.threads),
        Command::EmbedFb(a) => commands::embed_fb(a, cli.threads),
        Command::EmbedDd(a) => commands::embed_dd(a, cli.threads),
        Command::Classify(a) => commands::classify(a, cli.threads),
        Command::Scalability(a) => commands::scalability(a, cli.threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
