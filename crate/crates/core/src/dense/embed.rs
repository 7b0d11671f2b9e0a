use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::vector::EmbeddingVector;
use crate::error::{Error, Result};
use crate::lexical::{tokenize, TokenizerConfig};

/// Dimension of the offline feature-hashing embedder.
pub const MOCK_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Http,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingProviderConfig {
    pub kind: ProviderKind,
    pub base_url: Option<String>,
    pub model_name: Option<String>,
    pub batch_size: usize,
    pub timeout_s: f64,
    pub max_retries: u32,
    /// Concurrent HTTP batches per `embed` call.
    pub max_in_flight: usize,
    /// Environment variable holding a bearer token, if the endpoint needs one.
    pub api_key_env: Option<String>,
}

impl Default for EmbeddingProviderConfig {
    fn default() -> Self {
        EmbeddingProviderConfig {
            kind: ProviderKind::Mock,
            base_url: None,
            model_name: None,
            batch_size: 64,
            timeout_s: 60.0,
            max_retries: 3,
            max_in_flight: 4,
            api_key_env: None,
        }
    }
}

impl EmbeddingProviderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("embedding batch_size must be >= 1".into()));
        }
        if !(self.timeout_s > 0.0) {
            return Err(Error::Config("embedding timeout_s must be > 0".into()));
        }
        if self.kind == ProviderKind::Http && (self.base_url.is_none() || self.model_name.is_none()) {
            return Err(Error::Config(
                "http embedding provider needs base_url and model_name".into(),
            ));
        }
        Ok(())
    }

    /// Name used in cache keys.
    pub fn effective_model_name(&self) -> String {
        match self.kind {
            ProviderKind::Mock => format!("mock-hash-{MOCK_DIM}"),
            ProviderKind::Http => self.model_name.clone().unwrap_or_default(),
        }
    }
}

pub trait Embedder: Send + Sync {
    fn model_name(&self) -> &str;

    /// One vector per input text, in input order.
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>>;
}

/// Offline embedder: signed feature hashing of token counts followed by L2
/// normalization.
#[derive(Debug, Clone)]
pub struct MockEmbedder {
    name: String,
    tokenizer: TokenizerConfig,
}

impl Default for MockEmbedder {
    fn default() -> Self {
        MockEmbedder {
            name: format!("mock-hash-{MOCK_DIM}"),
            tokenizer: TokenizerConfig::default(),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl MockEmbedder {
    pub fn embed_one(&self, text: &str) -> EmbeddingVector {
        let mut values = vec![0f64; MOCK_DIM];
        let tokens = tokenize(text, &self.tokenizer);
        if tokens.is_empty() {
            values[0] = 1.0;
        }
        for token in &tokens {
            let h = fnv1a(token.as_bytes());
            let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
            values[(h % MOCK_DIM as u64) as usize] += sign;
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // every token cancelled out
            values[0] = 1.0;
        } else {
            values.iter_mut().for_each(|v| *v /= norm);
        }
        EmbeddingVector::new(values.into_iter().map(|v| v as f32).collect())
            .expect("hashed embedding is finite")
    }
}

impl Embedder for MockEmbedder {
    fn model_name(&self) -> &str {
        &self.name
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }
}

#[derive(Serialize)]
struct EmbeddingRequest<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    index: usize,
    embedding: Vec<f32>,
}

/// Client for an OpenAI-compatible `POST {base_url}/embeddings` endpoint.
pub struct HttpEmbedder {
    agent: ureq::Agent,
    url: String,
    model: String,
    api_key: Option<String>,
    batch_size: usize,
    max_retries: u32,
    max_in_flight: usize,
    backoff: Duration,
}

pub(crate) fn excerpt(body: &str) -> String {
    const MAX: usize = 300;
    match body.char_indices().nth(MAX) {
        Some((cut, _)) => format!("{}...", &body[..cut]),
        None => body.to_string(),
    }
}

pub(crate) fn http_agent(timeout_s: f64) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs_f64(timeout_s)))
        .http_status_as_error(false)
        .build()
        .into()
}

pub(crate) fn read_api_key(var: Option<&str>) -> Result<Option<String>> {
    match var {
        None => Ok(None),
        Some(var) => std::env::var(var)
            .map(Some)
            .map_err(|_| Error::Config(format!("environment variable {var} is not set"))),
    }
}

/// Outcome of one HTTP attempt: either a body or an error plus whether it is
/// worth retrying.
pub(crate) fn post_json<T: Serialize>(
    agent: &ureq::Agent,
    url: &str,
    api_key: Option<&str>,
    body: &T,
) -> std::result::Result<String, (Error, bool)> {
    let mut req = agent.post(url).header("Content-Type", "application/json");
    if let Some(key) = api_key {
        req = req.header("Authorization", &format!("Bearer {key}"));
    }
    let payload = serde_json::to_string(body).map_err(|e| (Error::json("request body", e), false))?;
    match req.send(payload.as_str()) {
        Ok(mut resp) => {
            let status = resp.status().as_u16();
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            if (200..300).contains(&status) {
                Ok(text)
            } else {
                let retry = status == 429 || status >= 500;
                Err((
                    Error::Provider {
                        status: Some(status),
                        message: excerpt(&text),
                    },
                    retry,
                ))
            }
        }
        Err(e) => Err((
            Error::Provider {
                status: None,
                message: e.to_string(),
            },
            true,
        )),
    }
}

pub(crate) fn with_retries<T>(
    max_retries: u32,
    backoff: Duration,
    mut attempt: impl FnMut() -> std::result::Result<T, (Error, bool)>,
) -> Result<T> {
    let mut tries = 0;
    loop {
        match attempt() {
            Ok(v) => return Ok(v),
            Err((err, retryable)) => {
                if !retryable || tries >= max_retries {
                    return Err(err);
                }
                log::warn!("request failed ({err}), retrying");
                thread::sleep(backoff * 2u32.pow(tries));
                tries += 1;
            }
        }
    }
}

impl HttpEmbedder {
    pub fn new(cfg: &EmbeddingProviderConfig) -> Result<Self> {
        cfg.validate()?;
        let base = cfg.base_url.as_deref().unwrap_or_default().trim_end_matches('/');
        Ok(HttpEmbedder {
            agent: http_agent(cfg.timeout_s),
            url: format!("{base}/embeddings"),
            model: cfg.model_name.clone().unwrap_or_default(),
            api_key: read_api_key(cfg.api_key_env.as_deref())?,
            batch_size: cfg.batch_size,
            max_retries: cfg.max_retries,
            max_in_flight: cfg.max_in_flight.max(1),
            backoff: Duration::from_millis(200),
        })
    }

    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    fn embed_one_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        let body = EmbeddingRequest {
            model: &self.model,
            input: texts,
        };
        let text = with_retries(self.max_retries, self.backoff, || {
            post_json(&self.agent, &self.url, self.api_key.as_deref(), &body)
        })?;
        let resp: EmbeddingResponse =
            serde_json::from_str(&text).map_err(|e| Error::json("embeddings response", e))?;
        let mut slots: Vec<Option<EmbeddingVector>> = vec![None; texts.len()];
        for datum in resp.data {
            let slot = slots.get_mut(datum.index).ok_or_else(|| Error::Provider {
                status: None,
                message: format!("embedding index {} out of range for batch of {}", datum.index, texts.len()),
            })?;
            *slot = Some(EmbeddingVector::new(datum.embedding)?);
        }
        let vectors = slots
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| Error::Provider {
                    status: None,
                    message: format!("no embedding returned for input {i}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        check_dims(&vectors)?;
        Ok(vectors)
    }
}

fn check_dims(vectors: &[EmbeddingVector]) -> Result<()> {
    if let Some(first) = vectors.first() {
        if let Some(bad) = vectors.iter().find(|v| v.dim() != first.dim()) {
            return Err(Error::Validation(format!(
                "embedding dimension mismatch within batch: {} vs {}",
                first.dim(),
                bad.dim()
            )));
        }
    }
    Ok(())
}

impl Embedder for HttpEmbedder {
    fn model_name(&self) -> &str {
        &self.model
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        let batches: Vec<&[String]> = texts.chunks(self.batch_size).collect();
        let mut out = Vec::with_capacity(texts.len());
        for wave in batches.chunks(self.max_in_flight) {
            let results: Vec<Result<Vec<EmbeddingVector>>> = thread::scope(|s| {
                let handles: Vec<_> = wave
                    .iter()
                    .map(|batch| s.spawn(move || self.embed_one_batch(batch)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("embedding worker panicked"))
                    .collect()
            });
            for r in results {
                out.extend(r?);
            }
        }
        check_dims(&out)?;
        Ok(out)
    }
}

pub fn build_embedder(cfg: &EmbeddingProviderConfig) -> Result<Box<dyn Embedder>> {
    cfg.validate()?;
    Ok(match cfg.kind {
        ProviderKind::Mock => Box::new(MockEmbedder::default()),
        ProviderKind::Http => Box::new(HttpEmbedder::new(cfg)?),
    })
}

/// Embeds `texts` with the provider described by `cfg`.
pub fn embed_batch(texts: &[String], cfg: &EmbeddingProviderConfig) -> Result<Vec<EmbeddingVector>> {
    if texts.is_empty() {
        return Err(Error::Validation("embed_batch needs at least one text".into()));
    }
    build_embedder(cfg)?.embed(texts)
}
