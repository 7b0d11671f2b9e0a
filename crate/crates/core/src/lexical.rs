//! Tokenization and Okapi BM25.
//!
//! The index is rebuilt per claim: once over the claim's chunks to prune the
//! knowledge store, and once over training claims to pick few-shot examples.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Split on (and drop) every non-alphanumeric character instead of
    /// splitting on whitespace only.
    pub strip_non_alphanumeric: bool,
    pub min_token_len: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            strip_non_alphanumeric: true,
            min_token_len: 1,
        }
    }
}

/// Applies `cfg` in order: lowercase, strip, length filter.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let text = if cfg.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    let min_len = cfg.min_token_len.max(1);
    let keep = |t: &&str| t.chars().count() >= min_len;
    if cfg.strip_non_alphanumeric {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(keep)
            .map(str::to_string)
            .collect()
    } else {
        text.split_whitespace().filter(keep).map(str::to_string).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1 >= 0.0 && self.k1.is_finite()) {
            return Err(Error::Validation(format!("bm25 k1 must be >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::Validation(format!("bm25 b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: usize,
    pub tf: u32,
}

/// Inverted index with per-document lengths.
#[derive(Debug, Clone)]
pub struct Bm25Index {
    postings: HashMap<String, Vec<Posting>>,
    doc_lengths: Vec<usize>,
    avg_doc_length: f64,
    params: Bm25Params,
}

/// Builds an index over pre-tokenized documents. Document ordinals are
/// positions in `docs`.
pub fn build_index<S: AsRef<str>>(docs: &[Vec<S>], params: Bm25Params) -> Result<Bm25Index> {
    params.validate()?;
    if docs.is_empty() {
        return Err(Error::Validation("cannot build a BM25 index over zero documents".into()));
    }
    let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
    let mut doc_lengths = Vec::with_capacity(docs.len());
    for (ordinal, tokens) in docs.iter().enumerate() {
        doc_lengths.push(tokens.len());
        let mut counts: HashMap<&str, u32> = HashMap::new();
        for token in tokens {
            *counts.entry(token.as_ref()).or_default() += 1;
        }
        for (term, tf) in counts {
            postings
                .entry(term.to_string())
                .or_default()
                .push(Posting { doc: ordinal, tf });
        }
    }
    let total: usize = doc_lengths.iter().sum();
    if total == 0 {
        return Err(Error::Validation("every document is empty of tokens".into()));
    }
    Ok(Bm25Index {
        postings,
        avg_doc_length: total as f64 / docs.len() as f64,
        doc_lengths,
        params,
    })
}

impl Bm25Index {
    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn doc_lengths(&self) -> &[usize] {
        &self.doc_lengths
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    /// Postings of `term`, ordered by document ordinal.
    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.postings(term).len() as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Scores every document against the query. Repeated query tokens
    /// contribute repeatedly.
    pub fn scores<S: AsRef<str>>(&self, query: &[S]) -> Vec<f64> {
        let Bm25Params { k1, b } = self.params;
        let mut scores = vec![0.0f64; self.doc_count()];
        for token in query {
            let term = token.as_ref();
            let postings = self.postings(term);
            if postings.is_empty() {
                continue;
            }
            let idf = self.idf(term);
            for p in postings {
                let tf = p.tf as f64;
                let dl = self.doc_lengths[p.doc] as f64;
                scores[p.doc] += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / self.avg_doc_length));
            }
        }
        scores
    }
}

/// The `omega` best documents for the query, by descending score with ties
/// broken by ascending ordinal. Documents scoring zero are never returned.
pub fn bm25_top<S: AsRef<str>>(index: &Bm25Index, query: &[S], omega: usize) -> Vec<(usize, f64)> {
    let mut hits: Vec<(usize, f64)> = index
        .scores(query)
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s > 0.0)
        .collect();
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    hits.truncate(omega);
    hits
}
