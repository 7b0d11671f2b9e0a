use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::types::{EvidenceQA, GeneratorConfig, GeneratorOutput, LikertRatings};
use crate::corpus::Claim;
use crate::dense::embed::{http_agent, post_json, read_api_key, with_retries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatProviderKind {
    /// OpenAI-compatible chat completions endpoint.
    Http,
    /// Scripted responses keyed by claim id.
    Mock,
    /// Answers with the claim's own gold evidence and label.
    Echo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatRequest {
    pub claim_id: u64,
    pub system: String,
    pub user: String,
}

pub trait ChatModel: Send + Sync {
    /// Returns the assistant message content.
    fn complete(&self, request: &ChatRequest) -> Result<String>;
}

pub fn call_llm(chat: &dyn ChatModel, request: &ChatRequest) -> Result<String> {
    chat.complete(request)
}

/// Replays scripted responses. Each claim's list is consumed front to back,
/// so a script can fail a few times before answering well.
#[derive(Debug, Default)]
pub struct MockChat {
    scripts: Mutex<HashMap<u64, VecDeque<String>>>,
}

impl MockChat {
    pub fn new(scripts: HashMap<u64, Vec<String>>) -> Self {
        MockChat {
            scripts: Mutex::new(scripts.into_iter().map(|(k, v)| (k, v.into())).collect()),
        }
    }
}

impl ChatModel for MockChat {
    fn complete(&self, request: &ChatRequest) -> Result<String> {
        let mut scripts = self.scripts.lock().unwrap();
        let queue = scripts.get_mut(&request.claim_id).ok_or_else(|| Error::NoScript {
            claim_id: request.claim_id,
            reason: "no scripted responses".into(),
        })?;
        queue.pop_front().ok_or_else(|| Error::NoScript {
            claim_id: request.claim_id,
            reason: "scripted responses exhausted".into(),
        })
    }
}

/// Reads a mock script: a JSON object mapping claim ids to lists of raw
/// response strings.
pub fn load_script(path: impl AsRef<Path>) -> Result<HashMap<u64, Vec<String>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: HashMap<String, Vec<String>> =
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
    raw.into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<u64>()
                .map(|id| (id, v))
                .map_err(|_| Error::Validation(format!("script key {k:?} is not a claim id")))
        })
        .collect()
}

/// Responds with each claim's gold evidence (all citing source 1), its gold
/// label rated 5 and the other labels rated 1.
#[derive(Debug, Default)]
pub struct EchoChat {
    gold: HashMap<u64, Claim>,
}

impl EchoChat {
    pub fn new(claims: &[Claim]) -> Self {
        EchoChat {
            gold: claims
                .iter()
                .filter(|c| c.gold_label.is_some())
                .map(|c| (c.id, c.clone()))
                .collect(),
        }
    }

    pub fn response_for(claim: &Claim) -> Option<String> {
        let label = claim.gold_label?;
        let out = GeneratorOutput {
            evidence: claim
                .gold_evidence
                .iter()
                .map(|g| EvidenceQA {
                    question: g.question.clone(),
                    answer: g.answer.clone(),
                    source_rank: 1,
                    answer_type: g.answer_type,
                })
                .collect(),
            ratings: LikertRatings::one_hot(label),
            verdict: label,
            raw_text: String::new(),
            parse_warnings: Vec::new(),
        };
        Some(out.to_model_json().to_string())
    }
}

impl ChatModel for EchoChat {
    fn complete(&self, request: &ChatRequest) -> Result<String> {
        self.gold
            .get(&request.claim_id)
            .and_then(EchoChat::response_for)
            .ok_or_else(|| Error::NoScript {
                claim_id: request.claim_id,
                reason: "no gold annotation to echo".into(),
            })
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatCompletionRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
}

#[derive(Deserialize)]
struct ChatCompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

/// Client for `POST {base_url}/chat/completions`.
pub struct HttpChat {
    agent: ureq::Agent,
    url: String,
    model: String,
    temperature: Option<f64>,
    api_key: Option<String>,
    retries: u32,
    backoff: Duration,
}

impl std::fmt::Debug for HttpChat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // the key is never printed
        f.debug_struct("HttpChat")
            .field("url", &self.url)
            .field("model", &self.model)
            .finish_non_exhaustive()
    }
}

impl HttpChat {
    /// Resolves credentials up front; a missing key fails here, before any
    /// request is sent.
    pub fn new(cfg: &GeneratorConfig) -> Result<Self> {
        if cfg.base_url.trim().is_empty() {
            return Err(Error::Config("generator base_url is empty".into()));
        }
        Ok(HttpChat {
            agent: http_agent(cfg.timeout_s),
            url: format!("{}/chat/completions", cfg.base_url.trim_end_matches('/')),
            model: cfg.model_name.clone(),
            temperature: cfg.temperature,
            api_key: read_api_key(cfg.api_key_env.as_deref())?,
            retries: cfg.http_retries,
            backoff: Duration::from_millis(500),
        })
    }

    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }
}

impl ChatModel for HttpChat {
    fn complete(&self, request: &ChatRequest) -> Result<String> {
        let body = ChatCompletionRequest {
            model: &self.model,
            messages: [
                ChatMessage {
                    role: "system",
                    content: &request.system,
                },
                ChatMessage {
                    role: "user",
                    content: &request.user,
                },
            ],
            temperature: self.temperature,
        };
        let text = with_retries(self.retries, self.backoff, || {
            post_json(&self.agent, &self.url, self.api_key.as_deref(), &body)
        })?;
        let resp: ChatCompletionResponse =
            serde_json::from_str(&text).map_err(|e| Error::json("chat completion response", e))?;
        resp.choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| Error::Provider {
                status: None,
                message: "chat completion response has no message content".into(),
            })
    }
}

/// Builds the provider named by `cfg`. `gold` feeds the echo provider.
pub fn build_chat_model(cfg: &GeneratorConfig, gold: &[Claim]) -> Result<Box<dyn ChatModel>> {
    cfg.validate()?;
    Ok(match cfg.provider {
        ChatProviderKind::Http => Box::new(HttpChat::new(cfg)?),
        ChatProviderKind::Echo => Box::new(EchoChat::new(gold)),
        ChatProviderKind::Mock => {
            let path = cfg
                .script_path
                .as_ref()
                .ok_or_else(|| Error::Config("mock chat provider needs script_path".into()))?;
            Box::new(MockChat::new(load_script(path)?))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(id: u64) -> ChatRequest {
        ChatRequest {
            claim_id: id,
            system: "s".into(),
            user: "u".into(),
        }
    }

    #[test]
    fn mock_replays_in_order() {
        let chat = MockChat::new(HashMap::from([(3, vec!["first".to_string(), "second".to_string()])]));
        assert_eq!(call_llm(&chat, &req(3)).unwrap(), "first");
        assert_eq!(call_llm(&chat, &req(3)).unwrap(), "second");
        assert!(matches!(chat.complete(&req(3)), Err(Error::NoScript { .. })));
        assert!(matches!(chat.complete(&req(9)), Err(Error::NoScript { claim_id: 9, .. })));
    }

    #[test]
    fn missing_key_is_config_error() {
        let cfg = GeneratorConfig {
            provider: ChatProviderKind::Http,
            api_key_env: Some("FACTCHECK_TEST_NO_SUCH_KEY".into()),
            ..Default::default()
        };
        assert!(matches!(build_chat_model(&cfg, &[]), Err(Error::Config(_))));
    }

    #[test]
    fn mock_requires_script() {
        let cfg = GeneratorConfig::default();
        assert!(matches!(build_chat_model(&cfg, &[]), Err(Error::Config(_))));
    }

    #[test]
    fn script_file_keys_parse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        std::fs::write(&path, r#"{"1": ["a", "b"], "20": []}"#).unwrap();
        let s = load_script(&path).unwrap();
        assert_eq!(s[&1], vec!["a", "b"]);
        std::fs::write(&path, r#"{"x": []}"#).unwrap();
        assert!(load_script(&path).is_err());
    }
}
