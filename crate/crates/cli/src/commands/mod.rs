mod cache;
mod evaluate;
mod ingest;
mod retrieve;
mod verify;

use std::path::{Path, PathBuf};

use factcheck_core::corpus::{load_dataset, Claim};

use crate::args::{CacheAction, ClaimFilter, Command};
use crate::config::AppConfig;
use crate::CliError;

pub use evaluate::REPORT_CSV_HEADER;

pub fn dispatch(command: &Command, config: &AppConfig) -> Result<(), CliError> {
    match command {
        Command::Ingest(filter) => ingest::run(config, filter),
        Command::Retrieve(args) => retrieve::run(config, args),
        Command::Verify(args) => verify::run(config, args),
        Command::Evaluate(args) => evaluate::run(config, args),
        Command::Cache { action } => match action {
            CacheAction::Inspect => cache::inspect(config),
            CacheAction::Clear => cache::clear(config),
        },
    }
}

/// The configured path for `key`, which must exist.
fn existing(path: &Option<PathBuf>, key: &str) -> Result<PathBuf, CliError> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("paths.{key} is not set (use --{} or the config file)", key.replace('_', "-"))))?;
    if !path.exists() {
        return Err(CliError::Usage(format!("paths.{key} does not exist: {}", path.display())));
    }
    Ok(path.clone())
}

fn read_dataset(path: &Path) -> Result<Vec<Claim>, CliError> {
    let claims = load_dataset(path)?;
    let mut seen = std::collections::HashSet::new();
    if let Some(c) = claims.iter().find(|c| !seen.insert(c.id)) {
        return Err(CliError::Usage(format!("{}: duplicate claim id {}", path.display(), c.id)));
    }
    Ok(claims)
}

/// Claims named by `filter`, in dataset order; all claims when it is empty.
fn select<'a>(claims: &'a [Claim], filter: &ClaimFilter) -> Result<Vec<&'a Claim>, CliError> {
    if filter.claim_ids.is_empty() {
        return Ok(claims.iter().collect());
    }
    let unknown: Vec<u64> = filter
        .claim_ids
        .iter()
        .copied()
        .filter(|id| !claims.iter().any(|c| c.id == *id))
        .collect();
    if !unknown.is_empty() {
        let valid: Vec<String> = claims.iter().map(|c| c.id.to_string()).collect();
        return Err(CliError::Usage(format!(
            "unknown claim id(s) {unknown:?}; valid ids: {}",
            valid.join(", ")
        )));
    }
    Ok(claims.iter().filter(|c| filter.claim_ids.contains(&c.id)).collect())
}
