use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "factcheck", version, about = "Retrieval-augmented claim verification")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Override one configuration key, e.g. `--set retrieval.k=5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[arg(long, global = true, value_name = "FILE")]
    pub dataset: Option<PathBuf>,

    /// JSON-lines file or directory of per-claim `<id>.jsonl` files.
    #[arg(long, global = true, value_name = "PATH")]
    pub knowledge_store: Option<PathBuf>,

    #[arg(long, global = true, value_name = "FILE")]
    pub train_set: Option<PathBuf>,

    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the dataset and knowledge stores and report chunk statistics.
    Ingest(ClaimFilter),
    /// Run retrieval and write one trace per claim.
    Retrieve(RunArgs),
    /// Run retrieval and generation and write predictions.
    Verify(VerifyArgs),
    /// Score predictions against the gold dataset.
    Evaluate(EvaluateArgs),
    /// Inspect or clear the embedding cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Args, Default)]
pub struct ClaimFilter {
    /// Restrict to these claim ids; repeatable.
    #[arg(long = "claim-id", value_name = "ID")]
    pub claim_ids: Vec<u64>,
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[command(flatten)]
    pub filter: ClaimFilter,

    /// Exit 0 even when some claims fail; failures are still recorded.
    #[arg(long)]
    pub keep_going: bool,
}

#[derive(Debug, Args, Default)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Discard saved progress instead of resuming.
    #[arg(long)]
    pub fresh: bool,
}

#[derive(Debug, Args, Default)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub filter: ClaimFilter,

    /// Prediction file; defaults to `<output_dir>/predictions.json`.
    #[arg(long, value_name = "FILE")]
    pub predictions: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Print entry counts per embedding model.
    Inspect,
    /// Delete the embedding cache file.
    Clear,
}
