//! Likert ratings to label probabilities, ensembling and the final label.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::LikertRatings;
use crate::labels::VeracityLabel;

/// Sum tolerance of a valid distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Tolerance accepted from externally produced probabilities, which are
/// renormalized after the check.
pub const EXTERNAL_SUM_TOLERANCE: f64 = 1e-6;

/// Tie-break order when the model's own verdict is not among the tied labels.
pub const TIE_ORDER: [VeracityLabel; 4] = [
    VeracityLabel::Supported,
    VeracityLabel::Refuted,
    VeracityLabel::ConflictingEvidenceCherrypicking,
    VeracityLabel::NotEnoughEvidence,
];

/// Probabilities indexed by [`VeracityLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelDistribution([f64; 4]);

impl LabelDistribution {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        Self::checked(probs, SUM_TOLERANCE)
    }

    fn checked(probs: [f64; 4], tolerance: f64) -> Result<Self> {
        for (label, p) in VeracityLabel::ALL.iter().zip(probs) {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!(
                    "probability of {label} must lie in [0, 1], got {p}"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::Validation(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(LabelDistribution(probs))
    }

    pub fn uniform() -> Self {
        LabelDistribution([0.25; 4])
    }

    pub fn get(&self, label: VeracityLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    /// Labels sharing the maximum probability exactly.
    pub fn argmax_set(&self) -> Vec<VeracityLabel> {
        let max = self.0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        VeracityLabel::ALL
            .into_iter()
            .filter(|l| self.get(*l) == max)
            .collect()
    }
}

impl Serialize for LabelDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(4))?;
        for label in VeracityLabel::ALL {
            map.serialize_entry(label.as_str(), &self.get(label))?;
        }
        map.end()
    }
}

/// Numerically stable softmax over real scores.
pub fn softmax(scores: &[f64; 4]) -> [f64; 4] {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps = scores.map(|s| (s - max).exp());
    let total: f64 = exps.iter().sum();
    exps.map(|e| e / total)
}

pub fn likert_softmax(ratings: &LikertRatings) -> LabelDistribution {
    let scores = ratings.values().map(f64::from);
    LabelDistribution(softmax(&scores))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    /// Weight of the external classifier; the chat model gets the rest.
    pub weight_external: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            weight_external: 0.5,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.weight_external) {
            return Err(Error::Validation(format!(
                "weight_external must lie in [0, 1], got {}",
                self.weight_external
            )));
        }
        Ok(())
    }
}

/// `w * p_ext + (1 - w) * p_llm`, labelwise.
pub fn ensemble(p_llm: &LabelDistribution, p_ext: &LabelDistribution, cfg: &EnsembleConfig) -> LabelDistribution {
    let w = cfg.weight_external;
    LabelDistribution(std::array::from_fn(|i| w * p_ext.0[i] + (1.0 - w) * p_llm.0[i]))
}

/// Argmax of `p`. Among exactly tied labels the model's verdict wins if
/// present, otherwise the first label of [`TIE_ORDER`].
pub fn final_label(p: &LabelDistribution, llm_verdict: VeracityLabel) -> VeracityLabel {
    let tied = p.argmax_set();
    if tied.contains(&llm_verdict) {
        return llm_verdict;
    }
    TIE_ORDER
        .into_iter()
        .find(|l| tied.contains(l))
        .expect("argmax set of four finite probabilities is non-empty")
}

#[derive(Deserialize)]
struct ExternalRecord {
    claim_id: u64,
    probs: HashMap<String, f64>,
}

/// Reads an external classifier file: a JSON array of
/// `{"claim_id": .., "probs": {label: p}}`.
pub fn parse_external_probs(text: &str) -> Result<HashMap<u64, LabelDistribution>> {
    let records: Vec<ExternalRecord> =
        serde_json::from_str(text).map_err(|e| Error::json("external probabilities", e))?;
    let mut out = HashMap::with_capacity(records.len());
    for (i, rec) in records.into_iter().enumerate() {
        let ctx = |msg: String| Error::Validation(format!("external probabilities[{i}] (claim {}): {msg}", rec.claim_id));
        let mut probs = [f64::NAN; 4];
        let mut seen = HashSet::new();
        for (key, p) in &rec.probs {
            let label: VeracityLabel = key.parse().map_err(|_| ctx(format!("unknown label {key:?}")))?;
            if !seen.insert(label) {
                return Err(ctx(format!("label {label} given twice")));
            }
            probs[label.index()] = *p;
        }
        if let Some(missing) = VeracityLabel::ALL.iter().find(|l| !seen.contains(l)) {
            return Err(ctx(format!("missing label {missing}")));
        }
        let checked = LabelDistribution::checked(probs, EXTERNAL_SUM_TOLERANCE).map_err(|e| ctx(e.to_string()))?;
        let sum: f64 = checked.0.iter().sum();
        let normalized = LabelDistribution(checked.0.map(|p| p / sum));
        if out.insert(rec.claim_id, normalized).is_some() {
            return Err(ctx("claim id appears twice".into()));
        }
    }
    Ok(out)
}

pub fn load_external_probs(path: impl AsRef<Path>) -> Result<HashMap<u64, LabelDistribution>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_external_probs(&text)
}
