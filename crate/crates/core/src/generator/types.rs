use std::path::PathBuf;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use super::llm::ChatProviderKind;
use crate::corpus::Claim;
use crate::error::{Error, Result};
use crate::labels::{AnswerType, VeracityLabel};
use crate::retriever::RetrievedSource;

/// One generated evidence item. `source_rank` is the 1-based source ID the
/// model cited; it may fall outside the retrieved range, which the parser
/// records as a warning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceQA {
    pub question: String,
    pub answer: String,
    pub source_rank: usize,
    pub answer_type: AnswerType,
}

/// Likert agreement (1..=5) with each of the four labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LikertRatings([u8; 4]);

impl LikertRatings {
    /// Ratings in [`VeracityLabel::ALL`] order.
    pub fn new(values: [u8; 4]) -> Result<Self> {
        for (label, v) in VeracityLabel::ALL.iter().zip(values) {
            if !(1..=5).contains(&v) {
                return Err(Error::Validation(format!(
                    "Likert rating for {label} must lie in 1..=5, got {v}"
                )));
            }
        }
        Ok(LikertRatings(values))
    }

    pub fn from_pairs(pairs: &[(VeracityLabel, u8)]) -> Result<Self> {
        let mut values: [Option<u8>; 4] = [None; 4];
        for &(label, v) in pairs {
            values[label.index()] = Some(v);
        }
        let mut out = [0u8; 4];
        for label in VeracityLabel::ALL {
            out[label.index()] = values[label.index()]
                .ok_or_else(|| Error::Validation(format!("missing Likert rating for {label}")))?;
        }
        LikertRatings::new(out)
    }

    /// 5 for `label`, 1 for the rest.
    pub fn one_hot(label: VeracityLabel) -> Self {
        let mut values = [1u8; 4];
        values[label.index()] = 5;
        LikertRatings(values)
    }

    pub fn get(&self, label: VeracityLabel) -> u8 {
        self.0[label.index()]
    }

    pub fn values(&self) -> [u8; 4] {
        self.0
    }
}

impl Serialize for LikertRatings {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(4))?;
        for label in VeracityLabel::ALL {
            map.serialize_entry(label.as_str(), &self.get(label))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LikertRatings {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RatingsVisitor;

        impl<'de> Visitor<'de> for RatingsVisitor {
            type Value = LikertRatings;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map from veracity label to a rating in 1..=5")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<LikertRatings, A::Error> {
                let mut pairs = Vec::new();
                while let Some((key, value)) = access.next_entry::<String, u8>()? {
                    let label: VeracityLabel = key.parse().map_err(de::Error::custom)?;
                    pairs.push((label, value));
                }
                LikertRatings::from_pairs(&pairs).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_map(RatingsVisitor)
    }
}

/// Parsed answer of the chat model.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorOutput {
    pub evidence: Vec<EvidenceQA>,
    pub ratings: LikertRatings,
    /// The model's own `veracity_verdict` field.
    pub verdict: VeracityLabel,
    pub raw_text: String,
    pub parse_warnings: Vec<String>,
}

impl GeneratorOutput {
    /// Renders the output back into the JSON layout the prompt asks for.
    pub fn to_model_json(&self) -> serde_json::Value {
        let questions: Vec<serde_json::Value> = self
            .evidence
            .iter()
            .map(|e| {
                serde_json::json!({
                    "question": e.question,
                    "answer": e.answer,
                    "source": e.source_rank.to_string(),
                    "answer_type": e.answer_type.as_str(),
                })
            })
            .collect();
        serde_json::json!({
            "questions": questions,
            "claim_veracity": self.ratings,
            "veracity_verdict": self.verdict.as_str(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    /// Maximum number of evidence pairs.
    pub l: usize,
    pub fewshot_count: usize,
    /// Regenerations after an unparseable answer.
    pub max_retries: u32,
    pub provider: ChatProviderKind,
    pub model_name: String,
    pub base_url: String,
    pub temperature: Option<f64>,
    /// Environment variable holding the API key for the http provider.
    pub api_key_env: Option<String>,
    /// Response script for the mock provider.
    pub script_path: Option<PathBuf>,
    pub timeout_s: f64,
    /// Transport-level retries of one HTTP request.
    pub http_retries: u32,
    /// Drops few-shot examples, answer types and Likert ratings.
    pub simplified: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            l: 10,
            fewshot_count: 10,
            max_retries: 3,
            provider: ChatProviderKind::Mock,
            model_name: "gpt-4o".into(),
            base_url: "https://api.openai.com/v1".into(),
            temperature: None,
            api_key_env: Some("OPENAI_API_KEY".into()),
            script_path: None,
            timeout_s: 120.0,
            http_retries: 3,
            simplified: false,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::Validation("generator l must be >= 1".into()));
        }
        if let Some(t) = self.temperature {
            if !(t >= 0.0) {
                return Err(Error::Validation(format!("temperature must be >= 0, got {t}")));
            }
        }
        if !(self.timeout_s > 0.0) {
            return Err(Error::Validation("generator timeout_s must be > 0".into()));
        }
        Ok(())
    }
}

/// Evidence as written to the prediction file, with the cited source
/// resolved to its URL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedEvidence {
    pub question: String,
    pub answer: String,
    pub source_url: Option<String>,
    pub answer_type: AnswerType,
}

/// One element of the prediction file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub claim_id: u64,
    pub claim: String,
    pub evidence: Vec<PredictedEvidence>,
    pub ratings: LikertRatings,
    pub verdict: VeracityLabel,
}

impl Prediction {
    pub fn new(
        claim: &Claim,
        output: &GeneratorOutput,
        sources: &[RetrievedSource],
        verdict: VeracityLabel,
    ) -> Self {
        let evidence = output
            .evidence
            .iter()
            .map(|e| PredictedEvidence {
                question: e.question.clone(),
                answer: e.answer.clone(),
                source_url: sources
                    .iter()
                    .find(|s| s.rank == e.source_rank)
                    .map(|s| s.chunk.doc_url.clone()),
                answer_type: e.answer_type,
            })
            .collect();
        Prediction {
            claim_id: claim.id,
            claim: claim.text.clone(),
            evidence,
            ratings: output.ratings,
            verdict,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratings_validate_range() {
        assert!(LikertRatings::new([1, 2, 3, 5]).is_ok());
        assert!(LikertRatings::new([0, 2, 3, 5]).is_err());
        assert!(LikertRatings::new([1, 6, 3, 5]).is_err());
    }

    #[test]
    fn ratings_serde_uses_label_keys() {
        let r = LikertRatings::new([2, 5, 2, 4]).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"Supported":2,"Refuted":5,"Not Enough Evidence":2,"Conflicting Evidence/Cherrypicking":4}"#
        );
        assert_eq!(serde_json::from_str::<LikertRatings>(&json).unwrap(), r);
        assert!(serde_json::from_str::<LikertRatings>(r#"{"Supported":2}"#).is_err());
    }
}
