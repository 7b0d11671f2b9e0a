//! Per-claim retrieval: chunk, BM25-prune, embed, exact KNN pool, MMR.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{chunk_document, Chunk, Claim, Document, DEFAULT_MAX_CHARS};
use crate::dense::{embed_with_cache, knn, mmr_select, Embedder, EmbeddingCache, MmrCandidate, MmrConfig, VectorIndex};
use crate::error::{Error, Result};
use crate::lexical::{bm25_top, build_index, tokenize, Bm25Params, TokenizerConfig};

/// BM25 pruning budget used for development-split claims.
pub const OMEGA_DEV: usize = 6000;
/// BM25 pruning budget used for test-split claims.
pub const OMEGA_TEST: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    pub max_chars: usize,
    pub omega: usize,
    pub pool_size: usize,
    pub k: usize,
    pub lambda: f64,
    pub bm25: Bm25Params,
    pub tokenizer: TokenizerConfig,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            max_chars: DEFAULT_MAX_CHARS,
            omega: OMEGA_DEV,
            pool_size: 40,
            k: 10,
            lambda: 0.75,
            bm25: Bm25Params::default(),
            tokenizer: TokenizerConfig::default(),
        }
    }
}

impl RetrievalConfig {
    pub fn test_split() -> Self {
        RetrievalConfig {
            omega: OMEGA_TEST,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_chars == 0 {
            return Err(Error::Validation("max_chars must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Validation("k must be >= 1".into()));
        }
        if !(self.k <= self.pool_size && self.pool_size <= self.omega) {
            return Err(Error::Validation(format!(
                "need k <= pool_size <= omega, got {} / {} / {}",
                self.k, self.pool_size, self.omega
            )));
        }
        self.bm25.validate()?;
        self.mmr().validate()
    }

    pub fn mmr(&self) -> MmrConfig {
        MmrConfig {
            lambda: self.lambda,
            pool_size: self.pool_size,
            select_size: self.k,
        }
    }
}

/// A chunk chosen for the prompt, with its 1-based citation rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievedSource {
    pub rank: usize,
    pub chunk: Chunk,
    pub sim_to_claim: f64,
}

/// Identifies a chunk within one claim's knowledge store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChunkKey {
    pub doc: usize,
    pub chunk: usize,
}

impl std::fmt::Display for ChunkKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.doc, self.chunk)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub key: String,
    pub sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedEntry {
    pub key: String,
    pub rank: usize,
}

/// Stage outputs of one retrieval run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalTrace {
    pub claim_id: u64,
    pub pruned_count: usize,
    pub pool: Vec<PoolEntry>,
    pub selected: Vec<SelectedEntry>,
}

/// Sources picked for a claim. An empty source list is a normal outcome (no
/// chunk shares a token with the claim) and leads to a Not Enough Evidence
/// verdict downstream.
#[derive(Debug, Clone)]
pub struct Retrieval {
    pub sources: Vec<RetrievedSource>,
    pub trace: RetrievalTrace,
    /// Every chunk that survived BM25 pruning and deduplication.
    pub pruned: Vec<ChunkKey>,
}

impl Retrieval {
    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    fn empty(claim_id: u64) -> Self {
        Retrieval {
            sources: Vec::new(),
            trace: RetrievalTrace {
                claim_id,
                pruned_count: 0,
                pool: Vec::new(),
                selected: Vec::new(),
            },
            pruned: Vec::new(),
        }
    }
}

/// Runs the retrieval stages for one claim.
///
/// Surviving chunks with identical text are collapsed to their best BM25
/// hit before embedding, so no two sources repeat the same passage.
pub fn retrieve(
    claim: &Claim,
    docs: &[Document],
    cfg: &RetrievalConfig,
    embedder: &dyn Embedder,
    cache: Option<&EmbeddingCache>,
) -> Result<Retrieval> {
    cfg.validate()?;
    let mut chunks: Vec<(ChunkKey, Chunk)> = Vec::new();
    for (d, doc) in docs.iter().enumerate() {
        for chunk in chunk_document(doc, cfg.max_chars) {
            chunks.push((ChunkKey { doc: d, chunk: chunk.index_in_doc }, chunk));
        }
    }
    if chunks.is_empty() {
        return Ok(Retrieval::empty(claim.id));
    }

    let token_lists: Vec<Vec<String>> = chunks
        .iter()
        .map(|(_, c)| tokenize(&c.text, &cfg.tokenizer))
        .collect();
    let index = match build_index(&token_lists, cfg.bm25) {
        Ok(index) => index,
        Err(Error::Validation(_)) => return Ok(Retrieval::empty(claim.id)),
        Err(e) => return Err(e),
    };
    let query = tokenize(&claim.text, &cfg.tokenizer);
    let hits = bm25_top(&index, &query, cfg.omega);

    let mut seen = HashSet::new();
    let survivors: Vec<usize> = hits
        .into_iter()
        .map(|(ordinal, _)| ordinal)
        .filter(|&o| seen.insert(chunks[o].1.text.as_str()))
        .collect();
    if survivors.is_empty() {
        return Ok(Retrieval::empty(claim.id));
    }

    let mut texts: Vec<String> = survivors.iter().map(|&o| chunks[o].1.text.clone()).collect();
    texts.push(claim.text.clone());
    let mut vectors = embed_with_cache(embedder, cache, claim.id, &texts)?;
    let claim_vec = vectors.pop().expect("claim embedding present");

    let mut vindex = VectorIndex::new();
    for (pos, v) in vectors.iter().enumerate() {
        vindex.insert(pos, v)?;
    }
    let pool = knn(&vindex, &claim_vec, cfg.pool_size)?;
    let candidates: Vec<MmrCandidate> = pool
        .iter()
        .map(|&(pos, sim)| MmrCandidate {
            id: pos,
            vector: vectors[pos].clone(),
            sim_to_query: sim,
        })
        .collect();
    let picked = mmr_select(&candidates, &cfg.mmr());

    let key_of = |pos: usize| chunks[survivors[pos]].0;
    let sim_of = |pos: usize| pool.iter().find(|p| p.0 == pos).map_or(0.0, |p| p.1);
    let sources: Vec<RetrievedSource> = picked
        .iter()
        .enumerate()
        .map(|(i, &pos)| RetrievedSource {
            rank: i + 1,
            chunk: chunks[survivors[pos]].1.clone(),
            sim_to_claim: sim_of(pos),
        })
        .collect();
    let trace = RetrievalTrace {
        claim_id: claim.id,
        pruned_count: survivors.len(),
        pool: pool
            .iter()
            .map(|&(pos, sim)| PoolEntry {
                key: key_of(pos).to_string(),
                sim,
            })
            .collect(),
        selected: picked
            .iter()
            .enumerate()
            .map(|(i, &pos)| SelectedEntry {
                key: key_of(pos).to_string(),
                rank: i + 1,
            })
            .collect(),
    };
    Ok(Retrieval {
        pruned: survivors.iter().map(|&o| chunks[o].0).collect(),
        sources,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::MockEmbedder;

    fn doc(url: &str, sentences: &[&str]) -> Document {
        Document::new(url, sentences.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn single_short_doc() {
        let claim = Claim::new(1, "The mayor raised taxes").unwrap();
        let docs = vec![doc("u", &["The mayor raised taxes in 2019.", "Nobody liked it."])];
        let r = retrieve(&claim, &docs, &RetrievalConfig::default(), &MockEmbedder::default(), None).unwrap();
        assert_eq!(r.sources.len(), 1);
        assert_eq!(r.sources[0].rank, 1);
        assert_eq!(r.sources[0].chunk.sentences, docs[0].sentences);
    }

    #[test]
    fn only_overlapping_doc_survives() {
        let claim = Claim::new(1, "zebras migrate north").unwrap();
        let docs = vec![
            doc("a", &["Cats sleep a lot."]),
            doc("b", &["Zebras migrate every year.", "They go north."]),
            doc("c", &["Stock prices fell."]),
        ];
        let cfg = RetrievalConfig { max_chars: 30, ..Default::default() };
        let r = retrieve(&claim, &docs, &cfg, &MockEmbedder::default(), None).unwrap();
        assert!(!r.is_empty());
        assert!(r.sources.iter().all(|s| s.chunk.doc_url == "b"));
    }

    #[test]
    fn no_overlap_is_empty_outcome() {
        let claim = Claim::new(1, "quantum").unwrap();
        let docs = vec![doc("a", &["Cats sleep."])];
        let r = retrieve(&claim, &docs, &RetrievalConfig::default(), &MockEmbedder::default(), None).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.trace.pruned_count, 0);
        let r = retrieve(&claim, &[], &RetrievalConfig::default(), &MockEmbedder::default(), None).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn duplicate_passages_collapse() {
        let claim = Claim::new(1, "budget vote").unwrap();
        let docs = vec![
            doc("a", &["The budget vote passed."]),
            doc("b", &["The budget vote passed."]),
            doc("c", &["A budget was drafted."]),
        ];
        let r = retrieve(&claim, &docs, &RetrievalConfig::default(), &MockEmbedder::default(), None).unwrap();
        assert_eq!(r.sources.len(), 2);
        assert_ne!(r.sources[0].chunk.text, r.sources[1].chunk.text);
    }

    #[test]
    fn config_ordering_enforced() {
        let cfg = RetrievalConfig { k: 50, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(RetrievalConfig::test_split().validate().is_ok());
    }
}
