use serde_json::{Map, Value};

use super::types::{EvidenceQA, GeneratorConfig, GeneratorOutput, LikertRatings};
use crate::error::{Error, Result};
use crate::labels::{AnswerType, VeracityLabel};

/// First complete JSON object in `raw`. Code fences and any prose around
/// the object are skipped.
pub fn extract_json_object(raw: &str) -> Option<Map<String, Value>> {
    for (start, _) in raw.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&raw[start..]).into_iter::<Value>();
        if let Some(Ok(Value::Object(map))) = stream.next() {
            return Some(map);
        }
    }
    None
}

fn parse_failure(reason: impl Into<String>, raw: &str) -> Error {
    Error::Parse {
        attempts: 1,
        reason: reason.into(),
        raw_text: raw.to_string(),
    }
}

/// Leading unsigned integer of a number or of a string such as `"4"`,
/// `"Source 3"` or `"4 (agree)"`.
fn loose_integer(v: &Value) -> Option<u64> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .or_else(|| n.as_f64().filter(|f| f.fract() == 0.0 && *f >= 0.0).map(|f| f as u64)),
        Value::String(s) => {
            let digits: String = s
                .chars()
                .skip_while(|c| !c.is_ascii_digit())
                .take_while(|c| c.is_ascii_digit())
                .collect();
            digits.parse().ok()
        }
        _ => None,
    }
}

fn text_field(item: &Map<String, Value>, key: &str) -> String {
    match item.get(key) {
        Some(Value::String(s)) => s.trim().to_string(),
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::Bool(b)) => b.to_string(),
        _ => String::new(),
    }
}

fn parse_ratings(value: Option<&Value>, raw: &str) -> Result<LikertRatings> {
    let Some(Value::Object(map)) = value else {
        return Err(parse_failure("missing claim_veracity ratings", raw));
    };
    let mut pairs = Vec::with_capacity(4);
    for (key, v) in map {
        let label = VeracityLabel::parse_lenient(key)
            .ok_or_else(|| parse_failure(format!("unknown rating label {key:?}"), raw))?;
        let rating = loose_integer(v)
            .filter(|r| (1..=5).contains(r))
            .ok_or_else(|| parse_failure(format!("rating for {label} is not in 1..=5: {v}"), raw))?;
        pairs.push((label, rating as u8));
    }
    LikertRatings::from_pairs(&pairs).map_err(|e| parse_failure(e.to_string(), raw))
}

/// Parses one model answer against `m_sources` retrieved sources.
///
/// Fails with [`Error::Parse`] when no JSON object is present or the verdict
/// (or, outside simplified mode, the ratings) is missing or malformed.
/// Recoverable defects are kept and described in `parse_warnings`.
pub fn parse_output(raw: &str, m_sources: usize, cfg: &GeneratorConfig) -> Result<GeneratorOutput> {
    let obj = extract_json_object(raw).ok_or_else(|| parse_failure("no JSON object found", raw))?;
    let mut warnings = Vec::new();

    let verdict = match obj.get("veracity_verdict") {
        Some(Value::String(s)) => VeracityLabel::parse_lenient(s)
            .ok_or_else(|| parse_failure(format!("unknown verdict {s:?}"), raw))?,
        _ => return Err(parse_failure("missing veracity_verdict", raw)),
    };
    let ratings = if cfg.simplified {
        LikertRatings::one_hot(verdict)
    } else {
        parse_ratings(obj.get("claim_veracity"), raw)?
    };

    let items: &[Value] = match obj.get("questions") {
        Some(Value::Array(items)) => items,
        None | Some(Value::Null) => &[],
        Some(_) => {
            warnings.push("questions is not a list; no evidence kept".to_string());
            &[]
        }
    };
    let mut evidence = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let Value::Object(item) = item else {
            warnings.push(format!("question {} is not an object; dropped", i + 1));
            continue;
        };
        let question = text_field(item, "question");
        let answer = text_field(item, "answer");
        if question.is_empty() || answer.is_empty() {
            warnings.push(format!("question {} has an empty question or answer; dropped", i + 1));
            continue;
        }
        let source_rank = item.get("source").and_then(loose_integer).unwrap_or(0) as usize;
        if !(1..=m_sources).contains(&source_rank) {
            let cited = item.get("source").map_or("nothing".to_string(), Value::to_string);
            warnings.push(format!(
                "question {} cites source {cited} outside 1..={m_sources}",
                i + 1
            ));
        }
        let answer_type = match item.get("answer_type") {
            Some(Value::String(s)) => s.trim().parse::<AnswerType>().unwrap_or_else(|_| {
                warnings.push(format!(
                    "question {} has unknown answer_type {s:?}; using Abstractive",
                    i + 1
                ));
                AnswerType::Abstractive
            }),
            None if cfg.simplified => AnswerType::Abstractive,
            other => {
                let shown = other.map_or("nothing".to_string(), Value::to_string);
                warnings.push(format!(
                    "question {} has unknown answer_type {shown}; using Abstractive",
                    i + 1
                ));
                AnswerType::Abstractive
            }
        };
        evidence.push(EvidenceQA {
            question,
            answer,
            source_rank,
            answer_type,
        });
    }
    if evidence.len() > cfg.l {
        warnings.push(format!(
            "{} evidence pairs truncated to {}",
            evidence.len(),
            cfg.l
        ));
        evidence.truncate(cfg.l);
    }

    Ok(GeneratorOutput {
        evidence,
        ratings,
        verdict,
        raw_text: raw.to_string(),
        parse_warnings: warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WELL_FORMED: &str = r#"{
  "questions": [
    {"question": "Who said it?", "answer": "The minister.", "source": "1", "answer_type": "Extractive"},
    {"question": "When?", "answer": "In 2020.", "source": "2", "answer_type": "Abstractive"},
    {"question": "Was it true?", "answer": "No", "source": "1", "answer_type": "Boolean"}
  ],
  "claim_veracity": {
    "Supported": "1",
    "Refuted": "5",
    "Not Enough Evidence": "2",
    "Conflicting Evidence/Cherrypicking": "1"
  },
  "veracity_verdict": "Refuted"
}"#;

    #[test]
    fn well_formed_has_no_warnings() {
        let out = parse_output(WELL_FORMED, 3, &GeneratorConfig::default()).unwrap();
        assert_eq!(out.evidence.len(), 3);
        assert!(out.parse_warnings.is_empty(), "{:?}", out.parse_warnings);
        assert_eq!(out.verdict, VeracityLabel::Refuted);
        assert_eq!(out.ratings.values(), [1, 5, 2, 1]);
        assert_eq!(out.evidence[2].answer_type, AnswerType::Boolean);
    }

    #[test]
    fn fences_do_not_matter() {
        let cfg = GeneratorConfig::default();
        let plain = parse_output(WELL_FORMED, 3, &cfg).unwrap();
        let fenced_raw = format!("Here you go:\n```json\n{WELL_FORMED}\n```\n");
        let fenced = parse_output(&fenced_raw, 3, &cfg).unwrap();
        assert_eq!(plain.evidence, fenced.evidence);
        assert_eq!(plain.ratings, fenced.ratings);
        assert_eq!(plain.verdict, fenced.verdict);
        assert_eq!(plain.parse_warnings, fenced.parse_warnings);
    }

    #[test]
    fn out_of_range_citation_is_kept_with_warning() {
        let raw = WELL_FORMED.replacen(r#""source": "2""#, r#""source": "7""#, 1);
        let out = parse_output(&raw, 5, &GeneratorConfig::default()).unwrap();
        assert_eq!(out.evidence.len(), 3);
        assert_eq!(out.evidence[1].source_rank, 7);
        assert_eq!(out.parse_warnings, vec![r#"question 2 cites source "7" outside 1..=5"#]);
    }

    #[test]
    fn unknown_answer_type_coerced() {
        let raw = WELL_FORMED.replace("Boolean", "Yes/No");
        let out = parse_output(&raw, 3, &GeneratorConfig::default()).unwrap();
        assert_eq!(out.evidence[2].answer_type, AnswerType::Abstractive);
        assert_eq!(out.parse_warnings.len(), 1);
    }

    #[test]
    fn truncates_beyond_l() {
        let cfg = GeneratorConfig {
            l: 2,
            ..Default::default()
        };
        let out = parse_output(WELL_FORMED, 3, &cfg).unwrap();
        assert_eq!(out.evidence.len(), 2);
        assert_eq!(out.parse_warnings, vec!["3 evidence pairs truncated to 2"]);
    }

    #[test]
    fn missing_fields_fail() {
        let cfg = GeneratorConfig::default();
        assert!(matches!(parse_output("no json here", 3, &cfg), Err(Error::Parse { .. })));
        let no_verdict = WELL_FORMED.replace("veracity_verdict", "other");
        assert!(matches!(parse_output(&no_verdict, 3, &cfg), Err(Error::Parse { .. })));
        let no_ratings = WELL_FORMED.replace("claim_veracity", "other");
        let err = parse_output(&no_ratings, 3, &cfg).unwrap_err();
        match err {
            Error::Parse { raw_text, .. } => assert_eq!(raw_text, no_ratings),
            e => panic!("unexpected {e}"),
        }
        let bad_rating = WELL_FORMED.replace(r#""Refuted": "5""#, r#""Refuted": "9""#);
        assert!(parse_output(&bad_rating, 3, &cfg).is_err());
    }

    #[test]
    fn simplified_synthesizes_ratings() {
        let cfg = GeneratorConfig {
            simplified: true,
            ..Default::default()
        };
        let raw = r#"{"questions": [{"question": "q", "answer": "a", "source": 1}], "veracity_verdict": "Supported"}"#;
        let out = parse_output(raw, 1, &cfg).unwrap();
        assert_eq!(out.ratings, LikertRatings::one_hot(VeracityLabel::Supported));
        assert!(out.parse_warnings.is_empty());
    }

    #[test]
    fn reparse_of_rendered_output_is_stable() {
        let cfg = GeneratorConfig::default();
        let raw = WELL_FORMED.replacen(r#""source": "2""#, r#""source": "Source ID: 9""#, 1);
        let first = parse_output(&raw, 3, &cfg).unwrap();
        let second = parse_output(&first.to_model_json().to_string(), 3, &cfg).unwrap();
        assert_eq!(first.evidence, second.evidence);
        assert_eq!(first.ratings, second.ratings);
        assert_eq!(first.verdict, second.verdict);
    }

    #[test]
    fn empty_items_dropped() {
        let raw = WELL_FORMED.replace(r#""answer": "No""#, r#""answer": "  ""#);
        let out = parse_output(&raw, 3, &GeneratorConfig::default()).unwrap();
        assert_eq!(out.evidence.len(), 2);
        assert_eq!(out.parse_warnings.len(), 1);
    }
}
