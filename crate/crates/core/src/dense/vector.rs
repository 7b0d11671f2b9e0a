use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense embedding. Components are finite; the dimension is the length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f32>", into = "Vec<f32>")]
pub struct EmbeddingVector(Vec<f32>);

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("embedding has zero dimensions".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "embedding component {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(EmbeddingVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
    }

    /// Unit-length copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<EmbeddingVector> {
        let norm = self.norm();
        if norm == 0.0 {
            return None;
        }
        Some(EmbeddingVector(self.0.iter().map(|&v| (v as f64 / norm) as f32).collect()))
    }

    pub fn scaled(&self, factor: f32) -> EmbeddingVector {
        EmbeddingVector(self.0.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f32>> for EmbeddingVector {
    type Error = Error;

    fn try_from(values: Vec<f32>) -> Result<Self> {
        EmbeddingVector::new(values)
    }
}

impl From<EmbeddingVector> for Vec<f32> {
    fn from(v: EmbeddingVector) -> Self {
        v.0
    }
}

pub(crate) fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

/// `dot(a, b) / (|a| |b|)`.
pub fn cosine_sim(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Validation(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Err(Error::Validation("cosine similarity of a zero vector".into()));
    }
    Ok((dot(&a.0, &b.0) / denom).clamp(-1.0, 1.0))
}

/// Exact cosine search over unit-normalized copies of the inserted vectors.
#[derive(Debug, Clone, Default)]
pub struct VectorIndex {
    dim: Option<usize>,
    vectors: Vec<EmbeddingVector>,
    payload_ids: Vec<usize>,
}

impl VectorIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, payload_id: usize, vector: &EmbeddingVector) -> Result<()> {
        match self.dim {
            Some(d) if d != vector.dim() => {
                return Err(Error::Validation(format!(
                    "index holds {d}-dimensional vectors, got {}",
                    vector.dim()
                )))
            }
            _ => self.dim = Some(vector.dim()),
        }
        let unit = vector
            .normalized()
            .ok_or_else(|| Error::Validation(format!("zero vector for payload {payload_id}")))?;
        self.vectors.push(unit);
        self.payload_ids.push(payload_id);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn vectors(&self) -> &[EmbeddingVector] {
        &self.vectors
    }

    pub fn payload_ids(&self) -> &[usize] {
        &self.payload_ids
    }
}

/// Exact top-`p` neighbours by cosine similarity, ties broken by insertion
/// order.
pub fn knn(index: &VectorIndex, query: &EmbeddingVector, p: usize) -> Result<Vec<(usize, f64)>> {
    if index.is_empty() || p == 0 {
        return Ok(Vec::new());
    }
    if index.dim != Some(query.dim()) {
        return Err(Error::Validation(format!(
            "query has {} dimensions, index has {:?}",
            query.dim(),
            index.dim
        )));
    }
    let q = query
        .normalized()
        .ok_or_else(|| Error::Validation("zero query vector".into()))?;
    let mut hits: Vec<(usize, usize, f64)> = index
        .vectors
        .iter()
        .enumerate()
        .map(|(pos, v)| (pos, index.payload_ids[pos], dot(&q.0, &v.0)))
        .collect();
    hits.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    hits.truncate(p);
    Ok(hits.into_iter().map(|(_, id, sim)| (id, sim)).collect())
}
