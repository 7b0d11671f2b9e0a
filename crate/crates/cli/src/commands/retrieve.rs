use std::path::Path;

use factcheck_core::corpus::Claim;
use factcheck_core::dense::{build_embedder, Embedder, EmbeddingCache};
use factcheck_core::retriever::{retrieve, Retrieval, RetrievalTrace};
use rayon::prelude::*;
use serde::Serialize;

use super::{existing, read_dataset, select};
use crate::args::RunArgs;
use crate::config::AppConfig;
use crate::output::{write_json, ErrorRecord};
use crate::store::StoreSource;
use crate::CliError;

pub const CACHE_FILE: &str = "embeddings.jsonl";

/// Knowledge store, embedder and embedding cache shared across claims.
pub(super) struct RetrievalStage {
    store: StoreSource,
    embedder: Box<dyn Embedder>,
    cache: EmbeddingCache,
}

impl RetrievalStage {
    pub(super) fn open(config: &AppConfig) -> Result<Self, CliError> {
        let store = StoreSource::open(&existing(&config.paths.knowledge_store, "knowledge_store")?)?;
        let embedder = build_embedder(&config.embedding)?;
        let cache = EmbeddingCache::open(config.paths.cache_dir.join(CACHE_FILE))?;
        Ok(RetrievalStage { store, embedder, cache })
    }

    pub(super) fn run(&self, claim: &Claim, config: &AppConfig) -> Result<Retrieval, CliError> {
        let ks = self.store.load(claim.id)?;
        Ok(retrieve(claim, &ks.documents, &config.retrieval, self.embedder.as_ref(), Some(&self.cache))?)
    }
}

#[derive(Serialize)]
struct SourceEntry<'a> {
    rank: usize,
    doc_url: &'a str,
    index_in_doc: usize,
    sim_to_claim: f64,
}

#[derive(Serialize)]
struct TraceFile<'a> {
    #[serde(flatten)]
    trace: &'a RetrievalTrace,
    sources: Vec<SourceEntry<'a>>,
}

fn write_trace(dir: &Path, retrieval: &Retrieval) -> Result<(), CliError> {
    let file = TraceFile {
        trace: &retrieval.trace,
        sources: retrieval
            .sources
            .iter()
            .map(|s| SourceEntry {
                rank: s.rank,
                doc_url: &s.chunk.doc_url,
                index_in_doc: s.chunk.index_in_doc,
                sim_to_claim: s.sim_to_claim,
            })
            .collect(),
    };
    write_json(&dir.join(format!("{}.json", retrieval.trace.claim_id)), &file)
}

pub fn run(config: &AppConfig, args: &RunArgs) -> Result<(), CliError> {
    let dataset = read_dataset(&existing(&config.paths.dataset, "dataset")?)?;
    let selected = select(&dataset, &args.filter)?;
    let stage = RetrievalStage::open(config)?;
    let dir = config.paths.output_dir.join("retrieval");

    let errors: Vec<ErrorRecord> = selected
        .par_iter()
        .filter_map(|claim| {
            let result = stage.run(claim, config).and_then(|r| write_trace(&dir, &r));
            result.err().map(|e| ErrorRecord {
                claim_id: claim.id,
                error: e.to_string(),
            })
        })
        .collect();

    write_json(&config.paths.output_dir.join("retrieve_errors.json"), &errors)?;
    for e in &errors {
        eprintln!("claim {}: {}", e.claim_id, e.error);
    }
    println!(
        "retrieve: {} claims, {} traces written to {}, {} failed",
        selected.len(),
        selected.len() - errors.len(),
        dir.display(),
        errors.len()
    );
    if errors.is_empty() || args.keep_going {
        Ok(())
    } else {
        Err(CliError::ClaimFailures {
            failed: errors.len(),
            total: selected.len(),
        })
    }
}
