//! Closed label vocabularies shared by the dataset, the generator and scoring.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// The four-way veracity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VeracityLabel {
    Supported,
    Refuted,
    NotEnoughEvidence,
    ConflictingEvidenceCherrypicking,
}

impl VeracityLabel {
    pub const ALL: [VeracityLabel; 4] = [
        VeracityLabel::Supported,
        VeracityLabel::Refuted,
        VeracityLabel::NotEnoughEvidence,
        VeracityLabel::ConflictingEvidenceCherrypicking,
    ];

    /// Canonical serialization string used by dataset and prediction files.
    pub fn as_str(self) -> &'static str {
        match self {
            VeracityLabel::Supported => "Supported",
            VeracityLabel::Refuted => "Refuted",
            VeracityLabel::NotEnoughEvidence => "Not Enough Evidence",
            VeracityLabel::ConflictingEvidenceCherrypicking => "Conflicting Evidence/Cherrypicking",
        }
    }

    /// Position in [`VeracityLabel::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Lenient match for model output: canonical strings, case-insensitive,
    /// plus the short forms models tend to produce ("NEE", "Cherrypicking",
    /// "Supported claim").
    pub fn parse_lenient(s: &str) -> Option<Self> {
        if let Ok(label) = s.parse() {
            return Some(label);
        }
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        let norm = norm.strip_suffix("claim").unwrap_or(&norm);
        match norm {
            "supported" | "support" | "true" => Some(VeracityLabel::Supported),
            "refuted" | "refute" | "false" => Some(VeracityLabel::Refuted),
            "notenoughevidence" | "nee" | "notenoughinfo" => Some(VeracityLabel::NotEnoughEvidence),
            "conflictingevidencecherrypicking"
            | "conflictingevidence"
            | "cherrypicking"
            | "conflicting" => Some(VeracityLabel::ConflictingEvidenceCherrypicking),
            _ => None,
        }
    }
}

impl fmt::Display for VeracityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VeracityLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VeracityLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown veracity label {s:?}")))
    }
}

impl Serialize for VeracityLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for VeracityLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How an evidence answer relates to its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnswerType {
    Extractive,
    Abstractive,
    Boolean,
    Unanswerable,
}

impl AnswerType {
    pub const ALL: [AnswerType; 4] = [
        AnswerType::Extractive,
        AnswerType::Abstractive,
        AnswerType::Boolean,
        AnswerType::Unanswerable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnswerType::Extractive => "Extractive",
            AnswerType::Abstractive => "Abstractive",
            AnswerType::Boolean => "Boolean",
            AnswerType::Unanswerable => "Unanswerable",
        }
    }
}

impl fmt::Display for AnswerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnswerType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnswerType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Validation(format!("unknown answer type {s:?}")))
    }
}

impl Serialize for AnswerType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for AnswerType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
