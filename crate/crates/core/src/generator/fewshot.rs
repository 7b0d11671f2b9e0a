use crate::corpus::Claim;
use crate::lexical::{bm25_top, build_index, tokenize, Bm25Index, Bm25Params, TokenizerConfig};

/// BM25 index over labelled training claims, built once and queried per
/// claim.
pub struct FewShotPool {
    claims: Vec<Claim>,
    index: Option<Bm25Index>,
    tokenizer: TokenizerConfig,
}

impl FewShotPool {
    /// Keeps only claims carrying a gold label and gold evidence.
    pub fn new(train_set: &[Claim]) -> Self {
        let tokenizer = TokenizerConfig::default();
        let claims: Vec<Claim> = train_set
            .iter()
            .filter(|c| c.gold_label.is_some() && !c.gold_evidence.is_empty())
            .cloned()
            .collect();
        let tokens: Vec<Vec<String>> = claims.iter().map(|c| tokenize(&c.text, &tokenizer)).collect();
        let index = build_index(&tokens, Bm25Params::default()).ok();
        FewShotPool {
            claims,
            index,
            tokenizer,
        }
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    /// Up to `count` most similar training claims, most similar first.
    /// Training claims with the same text as `claim` are skipped, as is the
    /// one carrying `exclude_id`.
    pub fn select(&self, claim: &Claim, count: usize, exclude_id: Option<u64>) -> Vec<Claim> {
        let Some(index) = &self.index else {
            return Vec::new();
        };
        if count == 0 {
            return Vec::new();
        }
        let query = tokenize(&claim.text, &self.tokenizer);
        bm25_top(index, &query, self.claims.len())
            .into_iter()
            .map(|(i, _)| &self.claims[i])
            .filter(|c| Some(c.id) != exclude_id && c.text != claim.text)
            .take(count)
            .cloned()
            .collect()
    }
}

/// BM25-nearest training claims for `claim`, excluding the claim's own id.
pub fn select_fewshot(claim: &Claim, train_set: &[Claim], count: usize) -> Vec<Claim> {
    FewShotPool::new(train_set).select(claim, count, Some(claim.id))
}
