//! Embeddings, exact cosine search and MMR reranking.

mod cache;
pub(crate) mod embed;
mod mmr;
mod vector;

pub use cache::{cache_key, embed_with_cache, EmbeddingCache};
pub use embed::{
    build_embedder, embed_batch, Embedder, EmbeddingProviderConfig, HttpEmbedder, MockEmbedder,
    ProviderKind, MOCK_DIM,
};
pub use mmr::{mmr_select, MmrCandidate, MmrConfig};
pub use vector::{cosine_sim, knn, EmbeddingVector, VectorIndex};
