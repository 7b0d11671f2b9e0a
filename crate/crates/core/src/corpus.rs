//! Dataset and knowledge-store ingestion, sentence segmentation and chunking.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::labels::{AnswerType, VeracityLabel};

/// Chunk size bound in characters: 512 embedding-model tokens at roughly
/// four characters per token.
pub const DEFAULT_MAX_CHARS: usize = 2048;

/// A gold question/answer evidence pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldQA {
    pub question: String,
    pub answer: String,
    pub answer_type: AnswerType,
}

/// A claim to verify, optionally with gold annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: u64,
    pub text: String,
    /// Ingested but not used anywhere in the pipeline.
    pub claim_date: Option<String>,
    pub gold_label: Option<VeracityLabel>,
    pub gold_evidence: Vec<GoldQA>,
}

impl Claim {
    pub fn new(id: u64, text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Validation(format!("claim {id} has empty text")));
        }
        Ok(Claim {
            id,
            text,
            claim_date: None,
            gold_label: None,
            gold_evidence: Vec::new(),
        })
    }

    pub fn with_gold(mut self, label: VeracityLabel, evidence: Vec<GoldQA>) -> Result<Self> {
        if evidence.is_empty() {
            return Err(Error::Validation(format!(
                "claim {} has a gold label but no gold evidence",
                self.id
            )));
        }
        self.gold_label = Some(label);
        self.gold_evidence = evidence;
        Ok(self)
    }
}

/// One knowledge-store entry: a scraped page, already sentence-split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub url: String,
    pub sentences: Vec<String>,
}

impl Document {
    /// Builds a document, dropping whitespace-only sentences. Returns `None`
    /// when nothing is left.
    pub fn new(url: impl Into<String>, sentences: Vec<String>) -> Option<Self> {
        let sentences: Vec<String> = sentences
            .into_iter()
            .filter(|s| !s.trim().is_empty())
            .collect();
        if sentences.is_empty() {
            None
        } else {
            Some(Document {
                url: url.into(),
                sentences,
            })
        }
    }
}

/// A contiguous run of document sentences plus the text of its neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub doc_url: String,
    pub index_in_doc: usize,
    /// Sentences of this chunk, in document order.
    pub sentences: Vec<String>,
    /// `sentences` joined with single spaces.
    pub text: String,
    pub prev_context: Option<String>,
    pub next_context: Option<String>,
    /// Set when a single sentence exceeds the size bound on its own.
    pub oversized: bool,
}

/// Result of reading one claim's knowledge store.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeStore {
    pub documents: Vec<Document>,
    /// Matching lines discarded because they carried no sentence text.
    pub dropped: usize,
}

#[derive(Deserialize)]
struct RawAnswer {
    #[serde(default)]
    answer: String,
    #[serde(default)]
    answer_type: Option<String>,
}

#[derive(Deserialize)]
struct RawQuestion {
    question: String,
    #[serde(default)]
    answers: Vec<RawAnswer>,
}

#[derive(Deserialize)]
struct RawClaim {
    claim: String,
    #[serde(default, alias = "id")]
    claim_id: Option<u64>,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    claim_date: Option<String>,
    #[serde(default)]
    questions: Vec<RawQuestion>,
}

impl RawClaim {
    fn into_claim(self, position: usize) -> Result<Claim> {
        let id = self.claim_id.unwrap_or(position as u64);
        let mut claim = Claim::new(id, self.claim)
            .map_err(|e| Error::Validation(format!("element {position}: {e}")))?;
        claim.claim_date = self.claim_date;
        let mut evidence = Vec::with_capacity(self.questions.len());
        for q in self.questions {
            let answer_type = match q.answers.first().and_then(|a| a.answer_type.as_deref()) {
                Some(t) => t
                    .parse()
                    .map_err(|e| Error::Validation(format!("element {position}: {e}")))?,
                None => AnswerType::Unanswerable,
            };
            let answer = q
                .answers
                .iter()
                .map(|a| a.answer.as_str())
                .collect::<Vec<_>>()
                .join("; ");
            evidence.push(GoldQA {
                question: q.question,
                answer,
                answer_type,
            });
        }
        match self.label {
            Some(label) => {
                let label: VeracityLabel = label
                    .parse()
                    .map_err(|e| Error::Validation(format!("element {position}: {e}")))?;
                claim
                    .with_gold(label, evidence)
                    .map_err(|e| Error::Validation(format!("element {position}: {e}")))
            }
            None => {
                claim.gold_evidence = evidence;
                Ok(claim)
            }
        }
    }
}

/// Parses a dataset held in memory. See [`load_dataset`].
pub fn parse_dataset(text: &str, source: &str) -> Result<Vec<Claim>> {
    let elements: Vec<Value> = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
    elements
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let raw: RawClaim = serde_json::from_value(value)
                .map_err(|e| Error::json(format!("{source}, element {i}"), e))?;
            raw.into_claim(i)
        })
        .collect()
}

/// Reads a JSON array of claims. Ids default to array position; multiple
/// answers of one question are joined with `"; "`.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<Claim>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, &path.display().to_string())
}

#[derive(Deserialize)]
struct RawStoreLine {
    #[serde(default)]
    claim_id: Option<u64>,
    #[serde(default)]
    url: String,
    #[serde(default)]
    url2text: Vec<String>,
}

/// Parses knowledge-store JSON lines for one claim. Lines without a
/// `claim_id` are taken to belong to the claim (per-claim store files).
pub fn parse_knowledge_store(text: &str, claim_id: u64, source: &str) -> Result<KnowledgeStore> {
    let mut store = KnowledgeStore::default();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawStoreLine = serde_json::from_str(line)
            .map_err(|e| Error::json(format!("{source}, line {}", lineno + 1), e))?;
        if raw.claim_id.is_some_and(|id| id != claim_id) {
            continue;
        }
        match Document::new(raw.url, raw.url2text) {
            Some(doc) => store.documents.push(doc),
            None => store.dropped += 1,
        }
    }
    Ok(store)
}

/// Reads the documents of `claim_id` from a JSON-lines knowledge store.
pub fn load_knowledge_store(path: impl AsRef<Path>, claim_id: u64) -> Result<KnowledgeStore> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_knowledge_store(&text, claim_id, &path.display().to_string())
}

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "vs", "etc", "e.g", "i.e", "u.s",
    "u.k", "inc", "ltd", "co", "corp", "gen", "gov", "sen", "rep", "rev", "hon", "no", "jan",
    "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "fig", "approx",
];

fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let stem = word.strip_suffix('.').unwrap_or(word);
    if stem.chars().count() == 1 && stem.chars().all(|c| c.is_uppercase()) {
        // single initial, "J. Smith"
        return true;
    }
    let lower = stem.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Rule-based sentence segmentation for free text.
///
/// A boundary is a `.`, `!` or `?` (plus any closing quotes or brackets)
/// followed by whitespace and then an uppercase letter or digit, possibly
/// behind opening quotes or brackets, unless the
/// word carrying the period is a known abbreviation or a single initial.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if matches!(c, '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end].1, '.' | '!' | '?' | '"' | '\'' | ')' | ']' | '”' | '’') {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].1.is_whitespace() {
                next += 1;
            }
            let mut first = next;
            while first < chars.len() && matches!(chars[first].1, '"' | '\'' | '(' | '[' | '“' | '‘') {
                first += 1;
            }
            let boundary = next > end
                && first < chars.len()
                && (chars[first].1.is_uppercase() || chars[first].1.is_ascii_digit());
            if boundary {
                let end_byte = chars.get(end).map_or(text.len(), |&(b, _)| b);
                let word_start = text[..end_byte]
                    .rfind(char::is_whitespace)
                    .map_or(0, |p| p + 1)
                    .max(start);
                let abbreviated = c == '.' && end == i + 1 && is_abbreviation(&text[word_start..end_byte]);
                if !abbreviated {
                    let sentence = text[start..end_byte].trim();
                    if !sentence.is_empty() {
                        sentences.push(sentence.to_string());
                    }
                    start = chars[next].0;
                    i = next;
                    continue;
                }
            }
            i = end;
        } else {
            i += 1;
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Greedily packs a document's sentences into chunks of at most `max_chars`
/// characters, measured on the sentences joined with single spaces.
///
/// A sentence longer than `max_chars` becomes a chunk of its own flagged as
/// oversized. Each chunk carries the full text of its neighbours.
pub fn chunk_document(doc: &Document, max_chars: usize) -> Vec<Chunk> {
    let max_chars = max_chars.max(1);
    let mut groups: Vec<(Vec<String>, usize, bool)> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut current_len = 0usize;

    for sentence in &doc.sentences {
        let len = char_len(sentence);
        if !current.is_empty() && current_len + 1 + len <= max_chars {
            current.push(sentence.clone());
            current_len += 1 + len;
            continue;
        }
        if !current.is_empty() {
            groups.push((std::mem::take(&mut current), current_len, false));
        }
        if len > max_chars {
            groups.push((vec![sentence.clone()], len, true));
            current_len = 0;
        } else {
            current.push(sentence.clone());
            current_len = len;
        }
    }
    if !current.is_empty() {
        groups.push((current, current_len, false));
    }

    let texts: Vec<String> = groups.iter().map(|(s, _, _)| s.join(" ")).collect();
    groups
        .into_iter()
        .enumerate()
        .map(|(i, (sentences, _, oversized))| Chunk {
            doc_url: doc.url.clone(),
            index_in_doc: i,
            text: texts[i].clone(),
            sentences,
            prev_context: i.checked_sub(1).map(|p| texts[p].clone()),
            next_context: texts.get(i + 1).cloned(),
            oversized,
        })
        .collect()
}
