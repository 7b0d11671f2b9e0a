use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use factcheck_core::generator::Prediction;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`,
/// so readers see either the old or the new content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut file = File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(format!("cannot write {}", path.display()), e)
    })
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub claim_id: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ProgressRecord {
    Ok { claim_id: u64, prediction: Prediction },
    Error { claim_id: u64, error: String },
}

/// Append-only log of finished claims. Lines are written whole under a
/// lock, one claim per line.
pub struct ProgressLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl ProgressLog {
    /// Opens the log at `path`, returning it with the predictions already
    /// recorded there. A torn final line is ignored and overwritten.
    pub fn open(path: &Path, fresh: bool) -> Result<(Self, HashMap<u64, Prediction>), CliError> {
        let mut done = HashMap::new();
        if fresh && path.exists() {
            fs::remove_file(path).map_err(|e| CliError::io(format!("cannot remove {}", path.display()), e))?;
        }
        if path.exists() {
            let text =
                fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
            let mut keep = 0;
            for line in text.split_inclusive('\n') {
                if !line.ends_with('\n') {
                    log::warn!("{}: ignoring incomplete final line", path.display());
                    break;
                }
                match serde_json::from_str::<ProgressRecord>(line) {
                    Ok(ProgressRecord::Ok { claim_id, prediction }) => {
                        done.insert(claim_id, prediction);
                    }
                    Ok(ProgressRecord::Error { .. }) => {}
                    Err(e) => {
                        return Err(CliError::Usage(format!("{} is corrupt ({e}); rerun with --fresh", path.display())))
                    }
                }
                keep += line.len();
            }
            if keep < text.len() {
                let file = OpenOptions::new()
                    .write(true)
                    .open(path)
                    .map_err(|e| CliError::io(format!("cannot open {}", path.display()), e))?;
                file.set_len(keep as u64)
                    .map_err(|e| CliError::io(format!("cannot truncate {}", path.display()), e))?;
            }
        } else if let Some(parent) = path.parent() {
            ensure_dir(parent)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(format!("cannot open {}", path.display()), e))?;
        Ok((
            ProgressLog {
                path: path.to_path_buf(),
                file: Mutex::new(file),
            },
            done,
        ))
    }

    pub fn append(&self, record: &ProgressRecord) -> Result<(), CliError> {
        let mut line = serde_json::to_string(record).expect("progress records serialize");
        line.push('\n');
        let mut file = self.file.lock().unwrap();
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| CliError::io(format!("cannot append to {}", self.path.display()), e))
    }
}
