//! Evidence and verdict generation with a chat model.
//!
//! [`build_prompt`] renders numbered sources and few-shot examples into a
//! system prompt, a [`ChatModel`] answers with JSON, and [`parse_output`]
//! turns that JSON into question/answer evidence, Likert ratings and a
//! verdict. [`run_generation`] composes the three with a retry loop.

mod fewshot;
mod llm;
mod parse;
mod prompt;
mod types;

pub use fewshot::{select_fewshot, FewShotPool};
pub use llm::{
    build_chat_model, call_llm, load_script, ChatModel, ChatProviderKind, ChatRequest, EchoChat,
    HttpChat, MockChat,
};
pub use parse::{extract_json_object, parse_output};
pub use prompt::build_prompt;
pub use types::{
    EvidenceQA, GeneratorConfig, GeneratorOutput, LikertRatings, PredictedEvidence, Prediction,
};

use crate::corpus::Claim;
use crate::error::{Error, Result};
use crate::labels::VeracityLabel;
use crate::retriever::RetrievedSource;

/// Output used when retrieval found nothing: no evidence, Not Enough
/// Evidence rated 5 and every other label 1.
pub fn empty_retrieval_output() -> GeneratorOutput {
    let verdict = VeracityLabel::NotEnoughEvidence;
    GeneratorOutput {
        evidence: Vec::new(),
        ratings: LikertRatings::one_hot(verdict),
        verdict,
        raw_text: String::new(),
        parse_warnings: vec!["empty retrieval: no sources, verdict defaults to Not Enough Evidence".into()],
    }
}

/// Prompts `chat` and parses its answer, regenerating up to
/// `cfg.max_retries` times when the answer cannot be parsed.
pub fn generate_with_fewshot(
    claim: &Claim,
    sources: &[RetrievedSource],
    fewshot: &[Claim],
    cfg: &GeneratorConfig,
    chat: &dyn ChatModel,
) -> Result<GeneratorOutput> {
    if sources.is_empty() {
        return Ok(empty_retrieval_output());
    }
    let (system, user) = build_prompt(claim, sources, fewshot, cfg);
    let request = ChatRequest {
        claim_id: claim.id,
        system,
        user,
    };
    let mut last_failure = None;
    for attempt in 0..=cfg.max_retries {
        let raw = chat.complete(&request)?;
        match parse_output(&raw, sources.len(), cfg) {
            Ok(mut out) => {
                if attempt > 0 {
                    out.parse_warnings.push(format!("retry_count {attempt}"));
                }
                return Ok(out);
            }
            Err(Error::Parse { reason, raw_text, .. }) => {
                log::warn!("claim {}: unparseable model output ({reason})", claim.id);
                last_failure = Some((reason, raw_text));
            }
            Err(e) => return Err(e),
        }
    }
    let (reason, raw_text) = last_failure.expect("at least one attempt was made");
    Err(Error::Parse {
        attempts: cfg.max_retries + 1,
        reason,
        raw_text,
    })
}

/// Few-shot selection, prompting, model call and parsing for one claim.
pub fn run_generation(
    claim: &Claim,
    sources: &[RetrievedSource],
    train_set: &[Claim],
    cfg: &GeneratorConfig,
    chat: &dyn ChatModel,
) -> Result<GeneratorOutput> {
    let fewshot = if cfg.simplified || sources.is_empty() {
        Vec::new()
    } else {
        select_fewshot(claim, train_set, cfg.fewshot_count)
    };
    generate_with_fewshot(claim, sources, &fewshot, cfg, chat)
}
