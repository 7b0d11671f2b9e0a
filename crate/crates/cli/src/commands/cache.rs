use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use factcheck_core::dense::EmbeddingCache;

use super::retrieve::CACHE_FILE;
use crate::config::AppConfig;
use crate::CliError;

pub fn inspect(config: &AppConfig) -> Result<(), CliError> {
    let path = config.paths.cache_dir.join(CACHE_FILE);
    if !path.exists() {
        println!("cache: {} does not exist", path.display());
        return Ok(());
    }
    let bytes = fs::metadata(&path)
        .map_err(|e| CliError::io(format!("cannot stat {}", path.display()), e))?
        .len();
    let cache = EmbeddingCache::open(&path)?;
    let mut per_model: BTreeMap<String, (usize, BTreeSet<String>)> = BTreeMap::new();
    for key in cache.keys() {
        let mut parts = key.splitn(3, '|');
        let model = parts.next().unwrap_or_default().to_string();
        let claim = parts.next().unwrap_or_default().to_string();
        let entry = per_model.entry(model).or_default();
        entry.0 += 1;
        entry.1.insert(claim);
    }
    println!("cache: {} ({} entries, {bytes} bytes)", path.display(), cache.len());
    for (model, (entries, claims)) in per_model {
        println!("  {model}: {entries} embeddings over {} claims", claims.len());
    }
    Ok(())
}

pub fn clear(config: &AppConfig) -> Result<(), CliError> {
    let path = config.paths.cache_dir.join(CACHE_FILE);
    if !path.exists() {
        println!("cache: nothing to clear at {}", path.display());
        return Ok(());
    }
    let entries = EmbeddingCache::open(&path).map(|c| c.len()).unwrap_or(0);
    fs::remove_file(&path).map_err(|e| CliError::io(format!("cannot remove {}", path.display()), e))?;
    println!("cache: removed {} ({entries} entries)", path.display());
    Ok(())
}
