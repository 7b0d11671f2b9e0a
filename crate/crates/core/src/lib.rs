//! Retrieval-augmented claim verification.
//!
//! The pipeline has two stages. The retriever chunks a claim's knowledge
//! store, prunes chunks lexically with BM25, embeds the survivors and picks
//! a diverse set of sources with maximal marginal relevance. The generator
//! prompts a chat model with those sources and parses question/answer
//! evidence, Likert label ratings and a verdict. The [`scoring`] module
//! evaluates predictions against gold data with Hungarian-matched METEOR.

pub mod corpus;
pub mod dense;
pub mod error;
pub mod generator;
pub mod labels;
pub mod lexical;
pub mod retriever;
pub mod scoring;
pub mod verdict;

pub use error::{Error, Result};
pub use labels::{AnswerType, VeracityLabel};
