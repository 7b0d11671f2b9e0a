use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::embed::Embedder;
use super::vector::EmbeddingVector;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    dim: usize,
    values: Vec<f32>,
}

/// Cache key for one embedded text: model, claim and content hash.
pub fn cache_key(claim_id: u64, text: &str, model_name: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("{model_name}|{claim_id}|{hex}")
}

/// Append-only JSON-lines store of embeddings, safe to share across threads.
pub struct EmbeddingCache {
    path: Option<PathBuf>,
    entries: Mutex<HashMap<String, EmbeddingVector>>,
    writer: Mutex<Option<File>>,
}

impl EmbeddingCache {
    pub fn in_memory() -> Self {
        EmbeddingCache {
            path: None,
            entries: Mutex::new(HashMap::new()),
            writer: Mutex::new(None),
        }
    }

    /// Loads the cache at `path`, creating it if missing. A truncated final
    /// line (interrupted write) is skipped.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let lines: Vec<&str> = text.lines().collect();
            let last = lines.len();
            for (i, line) in lines.into_iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let parsed: CacheLine = match serde_json::from_str(line) {
                    Ok(p) => p,
                    Err(_) if i + 1 == last && !text.ends_with('\n') => {
                        log::warn!("{}: dropping truncated final line", path.display());
                        let keep = text.rfind('\n').map_or(0, |p| p + 1);
                        let file = OpenOptions::new()
                            .write(true)
                            .open(&path)
                            .map_err(|e| Error::io(&path, e))?;
                        file.set_len(keep as u64).map_err(|e| Error::io(&path, e))?;
                        continue;
                    }
                    Err(e) => {
                        return Err(Error::json(format!("{}, line {}", path.display(), i + 1), e))
                    }
                };
                if parsed.values.len() != parsed.dim {
                    return Err(Error::Validation(format!(
                        "{}, line {}: dim {} but {} values",
                        path.display(),
                        i + 1,
                        parsed.dim,
                        parsed.values.len()
                    )));
                }
                entries.insert(parsed.key, EmbeddingVector::new(parsed.values)?);
            }
        } else if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        Ok(EmbeddingCache {
            path: Some(path),
            entries: Mutex::new(entries),
            writer: Mutex::new(None),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<EmbeddingVector> {
        self.entries.lock().unwrap().get(key).cloned()
    }

    pub fn keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = self.entries.lock().unwrap().keys().cloned().collect();
        keys.sort();
        keys
    }

    pub fn insert(&self, key: String, vector: EmbeddingVector) -> Result<()> {
        if let Some(path) = &self.path {
            let mut writer = self.writer.lock().unwrap();
            if writer.is_none() {
                let file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| Error::io(path, e))?;
                *writer = Some(file);
            }
            let line = serde_json::to_string(&CacheLine {
                key: key.clone(),
                dim: vector.dim(),
                values: vector.values().to_vec(),
            })
            .map_err(|e| Error::json("cache entry", e))?;
            let file = writer.as_mut().expect("writer opened above");
            writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
        }
        self.entries.lock().unwrap().insert(key, vector);
        Ok(())
    }
}

/// Embeds `texts`, serving hits from `cache` and storing misses.
pub fn embed_with_cache(
    embedder: &dyn Embedder,
    cache: Option<&EmbeddingCache>,
    claim_id: u64,
    texts: &[String],
) -> Result<Vec<EmbeddingVector>> {
    let Some(cache) = cache else {
        return embedder.embed(texts);
    };
    let keys: Vec<String> = texts
        .iter()
        .map(|t| cache_key(claim_id, t, embedder.model_name()))
        .collect();
    let mut out: Vec<Option<EmbeddingVector>> = keys.iter().map(|k| cache.get(k)).collect();
    let missing: Vec<usize> = (0..texts.len()).filter(|&i| out[i].is_none()).collect();
    if !missing.is_empty() {
        let batch: Vec<String> = missing.iter().map(|&i| texts[i].clone()).collect();
        let fresh = embedder.embed(&batch)?;
        for (&i, vector) in missing.iter().zip(fresh) {
            cache.insert(keys[i].clone(), vector.clone())?;
            out[i] = Some(vector);
        }
    }
    Ok(out.into_iter().map(|v| v.expect("filled above")).collect())
}
