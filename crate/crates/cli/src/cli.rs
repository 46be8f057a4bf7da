use std::path::PathBuf;

use bandgen_core::datasets::DatasetKind;
use bandgen_core::model::{Mode, Objective};
use bandgen_core::OrderingFamily;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Parser)]
#[command(name = "bandgen", version, about = "Bandwidth-restricted graph generation")]
pub struct Cli {
    /// Flat TOML file whose keys override command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Threads for per-graph stages. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_name = "K")]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus as JSON lines.
    Dataset(DatasetArgs),
    /// Bandwidth and savings-factor summary of a corpus as TSV.
    Report(ReportArgs),
    /// Train a generator and write a checkpoint.
    Train(TrainArgs),
    /// Draw graphs from a checkpoint.
    Sample(SampleArgs),
    /// MMD², precision/recall, AUPRC and likelihood against a test corpus.
    Eval(EvalArgs),
    /// Random search over learning rate and weight decay.
    Hyperopt(HyperoptArgs),
    /// Print the bandwidth before and after Cuthill-McKee and draw the matrix.
    Reorder(ReorderArgs),
    /// Spearman correlation between savings factor and likelihood gain.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long)]
    pub kind: Option<DatasetKind>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Copies of every graph.
    #[arg(long)]
    pub replicate: Option<usize>,
    /// Train,val,test fractions; writes `<out>.train.jsonl` and friends.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub split: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub order: Option<OrderingFamily>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dataset label in the first column; defaults to the file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Model flags shared by `train` and `hyperopt`.
#[derive(Debug, Args)]
pub struct ModelFlags {
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Columns per row including the indicator; estimated when absent.
    #[arg(long)]
    pub row_width: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub gru_layers: Option<usize>,
    #[arg(long)]
    pub mlp_hidden: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batches_per_epoch: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Validation corpus; otherwise a share of `--data` is held out.
    #[arg(long)]
    pub val: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
    /// Temperatures to try on the validation graphs after training.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub temp_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub ckpt: PathBuf,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub temp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Trained model; required for AUPRC and likelihood, and for sampling
    /// when `--generated` is absent.
    #[arg(long)]
    pub ckpt: Option<PathBuf>,
    #[arg(long)]
    pub test: PathBuf,
    /// Pre-generated graphs to score instead of sampling.
    #[arg(long)]
    pub generated: Option<PathBuf>,
    /// Graphs to sample; defaults to the test set size.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub temp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HyperoptArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub val: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub objective: Option<Objective>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReorderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Which graph of the file to show.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Ordering shown on the left of the arrow.
    #[arg(long, default_value = "identity")]
    pub before: OrderingFamily,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Graymap of the reordered adjacency matrix.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// TSV with a header naming `savings` (or `savings_mean`) and `delta_ll`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Collects set flags as config overrides.
#[derive(Default)]
pub struct Overrides(pub Vec<(String, Value)>);

impl Overrides {
    pub fn set<T: Serialize>(&mut self, key: &str, value: &Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.push((key.to_string(), serde_json::to_value(v).expect("flag values serialize")));
        }
        self
    }
}

impl ModelFlags {
    pub fn overrides(&self, o: &mut Overrides) {
        o.set("mode", &self.mode)
            .set("seed", &self.seed)
            .set("row_width", &self.row_width)
            .set("hidden", &self.hidden)
            .set("gru_layers", &self.gru_layers)
            .set("mlp_hidden", &self.mlp_hidden)
            .set("epochs", &self.epochs)
            .set("batches_per_epoch", &self.batches_per_epoch)
            .set("batch_size", &self.batch_size)
            .set("lr", &self.lr)
            .set("weight_decay", &self.weight_decay)
            .set("max_nodes", &self.max_nodes);
    }
}
