use std::fs;
use std::path::{Path, PathBuf};

use factcheck_core::corpus::{parse_knowledge_store, KnowledgeStore};

use crate::CliError;

/// Knowledge-store location: one JSON-lines file holding every claim's
/// documents, or a directory of per-claim files.
pub enum StoreSource {
    File { path: PathBuf, text: String },
    Dir(PathBuf),
}

impl StoreSource {
    pub fn open(path: &Path) -> Result<Self, CliError> {
        if path.is_dir() {
            return Ok(StoreSource::Dir(path.to_path_buf()));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read knowledge store {}", path.display()), e))?;
        Ok(StoreSource::File {
            path: path.to_path_buf(),
            text,
        })
    }

    /// Documents of one claim. In a directory the file is `<id>.jsonl` or
    /// `<id>.json`; a claim without a file is an error.
    pub fn load(&self, claim_id: u64) -> Result<KnowledgeStore, CliError> {
        match self {
            StoreSource::File { path, text } => {
                Ok(parse_knowledge_store(text, claim_id, &path.display().to_string())?)
            }
            StoreSource::Dir(dir) => {
                let candidates = [dir.join(format!("{claim_id}.jsonl")), dir.join(format!("{claim_id}.json"))];
                let path = candidates.iter().find(|p| p.is_file()).ok_or_else(|| {
                    CliError::Usage(format!("no knowledge store file for claim {claim_id} in {}", dir.display()))
                })?;
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
                Ok(parse_knowledge_store(&text, claim_id, &path.display().to_string())?)
            }
        }
    }
}
