use serde::{Deserialize, Serialize};

use super::vector::{dot, EmbeddingVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MmrConfig {
    /// Weight of query relevance against redundancy; 1.0 is plain relevance.
    pub lambda: f64,
    pub pool_size: usize,
    pub select_size: usize,
}

impl Default for MmrConfig {
    fn default() -> Self {
        MmrConfig {
            lambda: 0.75,
            pool_size: 40,
            select_size: 10,
        }
    }
}

impl MmrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Validation(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if self.select_size > self.pool_size {
            return Err(Error::Validation(format!(
                "select_size {} exceeds pool_size {}",
                self.select_size, self.pool_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MmrCandidate {
    pub id: usize,
    pub vector: EmbeddingVector,
    pub sim_to_query: f64,
}

fn cosine_or_zero(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        0.0
    } else {
        (dot(a.values(), b.values()) / denom).clamp(-1.0, 1.0)
    }
}

/// Greedy maximal-marginal-relevance selection.
///
/// Each step picks the remaining candidate maximizing
/// `lambda * sim_to_query - (1 - lambda) * max_{s in selected} cos(c, s)`,
/// with the redundancy term taken as 0 while nothing is selected. Ties go to
/// the higher `sim_to_query`, then to the earlier candidate.
///
/// # Panics
///
/// If candidate vectors differ in dimension.
pub fn mmr_select(candidates: &[MmrCandidate], cfg: &MmrConfig) -> Vec<usize> {
    if let Some(first) = candidates.first() {
        assert!(
            candidates.iter().all(|c| c.vector.dim() == first.vector.dim()),
            "mmr candidates must share one dimension"
        );
    }
    let want = cfg.select_size.min(candidates.len());
    let mut selected: Vec<usize> = Vec::with_capacity(want);
    let mut taken = vec![false; candidates.len()];
    // max similarity of each candidate to the selected set
    let mut redundancy = vec![f64::NEG_INFINITY; candidates.len()];

    while selected.len() < want {
        let mut best: Option<(usize, f64)> = None;
        for (i, cand) in candidates.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let red = if selected.is_empty() { 0.0 } else { redundancy[i] };
            let score = cfg.lambda * cand.sim_to_query - (1.0 - cfg.lambda) * red;
            let better = match best {
                None => true,
                Some((b, best_score)) => {
                    score > best_score
                        || (score == best_score && cand.sim_to_query > candidates[b].sim_to_query)
                }
            };
            if better {
                best = Some((i, score));
            }
        }
        let (pick, _) = best.expect("an unselected candidate remains");
        taken[pick] = true;
        selected.push(pick);
        for (i, cand) in candidates.iter().enumerate() {
            if !taken[i] {
                let sim = cosine_or_zero(&cand.vector, &candidates[pick].vector);
                if sim > redundancy[i] {
                    redundancy[i] = sim;
                }
            }
        }
    }
    selected.into_iter().map(|i| candidates[i].id).collect()
}
