use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "tracelink", version, about = "Trace link recovery: embeddings, tracing networks, IR baselines and evaluation")]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving every output file.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// JSON file with `sgns`, `network` and `synth` sections; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a vocabulary and a tokenized corpus from artifacts and text.
    CorpusBuild(CorpusBuildArgs),
    /// Train skip-gram word embeddings.
    Embed(EmbedArgs),
    /// Train one tracing network and score the test split.
    Train(TrainArgs),
    /// Grid search over network configurations.
    Grid(GridArgs),
    /// MAP, precision-recall curves and significance tests over score files.
    Eval(EvalArgs),
    /// Score pairs with the VSM and LSI baselines.
    Baseline(BaselineArgs),
    /// Export gate activations of a trained network on one artifact.
    Gates(GatesArgs),
    /// Generate a synthetic benchmark.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Artifact file (JSON lines).
    #[arg(long)]
    pub artifacts: PathBuf,
    /// Gold link file (CSV source_id,target_id).
    #[arg(long)]
    pub links: PathBuf,
    /// Split file; without it the pairs are split 45/10/45 with --seed.
    #[arg(long)]
    pub splits: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusBuildArgs {
    #[arg(long)]
    pub artifacts: PathBuf,
    /// Additional raw text, one sentence per line.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Raw text, one sentence per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Vocabulary file; built from the corpus when absent.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct NetworkArgs {
    /// gru, lstm, rnn or avevect.
    #[arg(long)]
    pub cell: Option<String>,
    #[arg(long)]
    pub bidirectional: bool,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub integration_dim: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub gc: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Embedding text file.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Move test pairs into training until it holds this fraction.
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Method name written into the score file; defaults to the unit label.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// `TAG=PATH` embedding sources; a bare path is tagged `default`.
    #[arg(long, required = true)]
    pub embeddings: Vec<String>,
    /// Search space JSON; the full default grid when absent.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Comma-separated seeds; defaults to --seed.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Training runs in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub artifacts: PathBuf,
    #[arg(long)]
    pub links: PathBuf,
    /// Score files (CSV source_id,target_id,score,method).
    #[arg(long, required = true)]
    pub scores: Vec<PathBuf>,
    /// Restrict evaluation to one split of this split file.
    #[arg(long)]
    pub splits: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub split: String,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// vsm, lsi or all.
    #[arg(long, default_value = "all")]
    pub method: String,
    /// LSI rank as a share of min(terms, documents).
    #[arg(long, default_value_t = crate::baselines::DEFAULT_RANK_FRACTION)]
    pub rank_fraction: f64,
    /// Stopword list replacing the built-in one.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GatesArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Raw text to trace.
    #[arg(long, conflicts_with_all = ["artifacts", "artifact_id"])]
    pub text: Option<String>,
    #[arg(long, requires = "artifact_id")]
    pub artifacts: Option<PathBuf>,
    #[arg(long, requires = "artifacts")]
    pub artifact_id: Option<String>,
    /// Comma-separated hidden dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub layer: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// lexical or synonym.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub n_sources: Option<usize>,
    #[arg(long)]
    pub n_targets: Option<usize>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub corpus_lines: Option<usize>,
    #[arg(long)]
    pub glossary_rate: Option<f64>,
}
