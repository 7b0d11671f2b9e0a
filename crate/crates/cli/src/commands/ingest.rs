use factcheck_core::corpus::chunk_document;
use rayon::prelude::*;
use serde::Serialize;

use super::{existing, read_dataset, select};
use crate::args::ClaimFilter;
use crate::config::AppConfig;
use crate::output::{write_json, ErrorRecord};
use crate::store::StoreSource;
use crate::CliError;

#[derive(Debug, Default, Serialize)]
struct ClaimStats {
    claim_id: u64,
    documents: usize,
    dropped: usize,
    chunks: usize,
    oversized: usize,
}

#[derive(Debug, Serialize)]
struct IngestReport {
    claims: usize,
    documents: usize,
    dropped: usize,
    chunks: usize,
    oversized: usize,
    per_claim: Vec<ClaimStats>,
    errors: Vec<ErrorRecord>,
}

pub fn run(config: &AppConfig, filter: &ClaimFilter) -> Result<(), CliError> {
    let dataset = read_dataset(&existing(&config.paths.dataset, "dataset")?)?;
    let store = StoreSource::open(&existing(&config.paths.knowledge_store, "knowledge_store")?)?;
    let selected = select(&dataset, filter)?;

    let results: Vec<Result<ClaimStats, ErrorRecord>> = selected
        .par_iter()
        .map(|claim| {
            let ks = store.load(claim.id).map_err(|e| ErrorRecord {
                claim_id: claim.id,
                error: e.to_string(),
            })?;
            let mut stats = ClaimStats {
                claim_id: claim.id,
                documents: ks.documents.len(),
                dropped: ks.dropped,
                ..Default::default()
            };
            for doc in &ks.documents {
                let chunks = chunk_document(doc, config.retrieval.max_chars);
                stats.chunks += chunks.len();
                stats.oversized += chunks.iter().filter(|c| c.oversized).count();
            }
            Ok(stats)
        })
        .collect();

    let (mut per_claim, mut errors) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(s) => per_claim.push(s),
            Err(e) => errors.push(e),
        }
    }
    let report = IngestReport {
        claims: per_claim.len(),
        documents: per_claim.iter().map(|s| s.documents).sum(),
        dropped: per_claim.iter().map(|s| s.dropped).sum(),
        chunks: per_claim.iter().map(|s| s.chunks).sum(),
        oversized: per_claim.iter().map(|s| s.oversized).sum(),
        per_claim,
        errors,
    };
    write_json(&config.paths.output_dir.join("ingest.json"), &report)?;
    println!(
        "ingest: {} claims, {} documents ({} dropped), {} chunks ({} oversized), {} errors",
        report.claims,
        report.documents,
        report.dropped,
        report.chunks,
        report.oversized,
        report.errors.len()
    );
    for e in &report.errors {
        eprintln!("claim {}: {}", e.claim_id, e.error);
    }
    if report.errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::ClaimFailures {
            failed: report.errors.len(),
            total: selected.len(),
        })
    }
}
