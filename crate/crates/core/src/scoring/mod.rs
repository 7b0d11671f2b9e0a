//! Evaluation: METEOR-lite text similarity, Hungarian matching of predicted
//! to gold evidence, thresholded claim scores, accuracy and macro-F1.

mod hungarian;
mod meteor;
mod stemmer;

pub use hungarian::{hungarian_max, Assignment};
pub use meteor::{align, count_chunks, count_crossings, meteor_lite, meteor_tokens, MeteorParams};
pub use stemmer::porter_stem;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Claim, GoldQA};
use crate::error::{Error, Result};
use crate::generator::{EvidenceQA, PredictedEvidence, Prediction};
use crate::labels::VeracityLabel;

/// A question/answer pair that can be scored.
pub trait QaText {
    fn question(&self) -> &str;
    fn answer(&self) -> &str;
}

macro_rules! impl_qa_text {
    ($($t:ty),*) => {$(
        impl QaText for $t {
            fn question(&self) -> &str {
                &self.question
            }
            fn answer(&self) -> &str {
                &self.answer
            }
        }
    )*};
}

impl_qa_text!(EvidenceQA, GoldQA, PredictedEvidence);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMode {
    /// Questions only.
    QOnly,
    /// Question and answer joined by a space.
    Qa,
}

impl ScoreMode {
    fn text<T: QaText>(self, qa: &T) -> String {
        match self {
            ScoreMode::QOnly => qa.question().to_string(),
            ScoreMode::Qa => format!("{} {}", qa.question(), qa.answer()),
        }
    }
}

/// Sum of METEOR scores under the best one-to-one matching of predictions
/// to gold pairs, divided by the number of gold pairs.
pub fn hu_meteor<P: QaText, G: QaText>(pred: &[P], gold: &[G], mode: ScoreMode, p: &MeteorParams) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::Validation("gold evidence is empty".into()));
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let gold_text: Vec<String> = gold.iter().map(|g| mode.text(g)).collect();
    let matrix: Vec<Vec<f64>> = pred
        .iter()
        .map(|q| {
            let cand = mode.text(q);
            gold_text.iter().map(|r| meteor_lite(&cand, r, p)).collect()
        })
        .collect();
    Ok(hungarian_max(&matrix)?.total / gold.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringConfig {
    /// Hu-METEOR cut-offs for counting evidence as sound, each in (0, 1].
    pub thresholds: Vec<f64>,
    /// Evidence comparison used against the thresholds.
    pub mode: ScoreMode,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            thresholds: vec![0.25],
            mode: ScoreMode::Qa,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return Err(Error::Validation("at least one threshold is required".into()));
        }
        if let Some(t) = self.thresholds.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::Validation(format!("threshold {t} is outside (0, 1]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScore {
    pub threshold: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimScore {
    pub claim_id: u64,
    pub hu_meteor_q: f64,
    pub hu_meteor_qa: f64,
    pub label_pred: VeracityLabel,
    pub label_gold: VeracityLabel,
    pub label_correct: bool,
}

impl ClaimScore {
    pub fn hu_meteor(&self, mode: ScoreMode) -> f64 {
        match mode {
            ScoreMode::QOnly => self.hu_meteor_q,
            ScoreMode::Qa => self.hu_meteor_qa,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub q_score: f64,
    pub qa_score: f64,
    pub averitec: Vec<ThresholdScore>,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub mode: ScoreMode,
    pub per_claim: Vec<ClaimScore>,
}

impl ScoreReport {
    pub fn averitec_at(&self, threshold: f64) -> Option<f64> {
        self.averitec
            .iter()
            .find(|t| t.threshold == threshold)
            .map(|t| t.score)
    }
}

/// Unweighted mean of per-label F1 over all four labels. A label absent
/// from both sides contributes 0.
pub fn macro_f1(pairs: &[(VeracityLabel, VeracityLabel)]) -> f64 {
    let mut sum = 0.0;
    for label in VeracityLabel::ALL {
        let tp = pairs.iter().filter(|(p, g)| *p == label && *g == label).count() as f64;
        let pred = pairs.iter().filter(|(p, _)| *p == label).count() as f64;
        let gold = pairs.iter().filter(|(_, g)| *g == label).count() as f64;
        if pred + gold > 0.0 {
            sum += 2.0 * tp / (pred + gold);
        }
    }
    sum / VeracityLabel::ALL.len() as f64
}

/// Scores predictions against gold claims. Every gold claim needs exactly
/// one prediction and every prediction a gold claim.
pub fn averitec_score(
    preds: &[Prediction],
    golds: &[Claim],
    cfg: &ScoringConfig,
    p: &MeteorParams,
) -> Result<ScoreReport> {
    cfg.validate()?;
    p.validate()?;
    if golds.is_empty() {
        return Err(Error::Validation("no gold claims to score".into()));
    }
    let mut by_id: HashMap<u64, &Prediction> = HashMap::with_capacity(preds.len());
    let mut duplicates = Vec::new();
    for pred in preds {
        if by_id.insert(pred.claim_id, pred).is_some() {
            duplicates.push(pred.claim_id);
        }
    }
    if !duplicates.is_empty() {
        duplicates.sort_unstable();
        duplicates.dedup();
        return Err(Error::Validation(format!("duplicate predictions for claim ids {duplicates:?}")));
    }
    let gold_ids: HashSet<u64> = golds.iter().map(|c| c.id).collect();
    let missing: Vec<u64> = golds.iter().map(|c| c.id).filter(|id| !by_id.contains_key(id)).collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!("missing predictions for claim ids {missing:?}")));
    }
    let mut extra: Vec<u64> = by_id.keys().copied().filter(|id| !gold_ids.contains(id)).collect();
    if !extra.is_empty() {
        extra.sort_unstable();
        return Err(Error::Validation(format!("predictions for unknown claim ids {extra:?}")));
    }

    let mut per_claim = Vec::with_capacity(golds.len());
    for gold in golds {
        let label_gold = gold
            .gold_label
            .ok_or_else(|| Error::Validation(format!("claim {} has no gold label", gold.id)))?;
        if gold.gold_evidence.is_empty() {
            return Err(Error::Validation(format!("claim {} has no gold evidence", gold.id)));
        }
        let pred = by_id[&gold.id];
        per_claim.push(ClaimScore {
            claim_id: gold.id,
            hu_meteor_q: hu_meteor(&pred.evidence, &gold.gold_evidence, ScoreMode::QOnly, p)?,
            hu_meteor_qa: hu_meteor(&pred.evidence, &gold.gold_evidence, ScoreMode::Qa, p)?,
            label_pred: pred.verdict,
            label_gold,
            label_correct: pred.verdict == label_gold,
        });
    }

    let n = per_claim.len() as f64;
    let mean = |f: &dyn Fn(&ClaimScore) -> f64| per_claim.iter().map(f).sum::<f64>() / n;
    let averitec = cfg
        .thresholds
        .iter()
        .map(|&t| ThresholdScore {
            threshold: t,
            score: per_claim
                .iter()
                .filter(|c| c.label_correct && c.hu_meteor(cfg.mode) >= t)
                .count() as f64
                / n,
        })
        .collect();
    let labels: Vec<(VeracityLabel, VeracityLabel)> =
        per_claim.iter().map(|c| (c.label_pred, c.label_gold)).collect();
    Ok(ScoreReport {
        q_score: mean(&|c| c.hu_meteor_q),
        qa_score: mean(&|c| c.hu_meteor_qa),
        averitec,
        accuracy: mean(&|c| if c.label_correct { 1.0 } else { 0.0 }),
        macro_f1: macro_f1(&labels),
        mode: cfg.mode,
        per_claim,
    })
}
