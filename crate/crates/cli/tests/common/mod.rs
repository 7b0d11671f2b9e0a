//! Helpers for driving the `factcheck` binary inside a scratch directory.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

pub const CLAIM_IDS: [u64; 10] = [101, 102, 103, 104, 105, 106, 107, 108, 109, 110];

pub struct Workspace {
    pub dir: TempDir,
    env: Vec<(String, String)>,
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl From<Output> for Run {
    fn from(out: Output) -> Self {
        Run {
            code: out.status.code().unwrap_or(-1),
            stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        }
    }
}

impl Workspace {
    pub fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
            env: Vec::new(),
        }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    pub fn with_env(mut self, key: &str, value: &str) -> Self {
        self.env.push((key.into(), value.into()));
        self
    }

    /// Runs the binary in the workspace with a clean `FACTCHECK_*`
    /// environment plus the workspace's own variables.
    pub fn run<S: AsRef<str>>(&self, args: &[S]) -> Run {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_factcheck"));
        cmd.current_dir(self.dir.path());
        for (key, _) in std::env::vars() {
            if key.starts_with("FACTCHECK_") || key == "RUST_LOG" {
                cmd.env_remove(key);
            }
        }
        for (k, v) in &self.env {
            cmd.env(k, v);
        }
        cmd.args(args.iter().map(|a| a.as_ref()));
        cmd.output().unwrap().into()
    }

    pub fn run_ok<S: AsRef<str>>(&self, args: &[S]) -> Run {
        let run = self.run(args);
        assert_eq!(run.code, 0, "stdout: {}\nstderr: {}", run.stdout, run.stderr);
        run
    }

    pub fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }

    pub fn json(&self, rel: &str) -> Value {
        serde_json::from_str(&self.read(rel)).unwrap()
    }
}

/// Dataset, knowledge store and training set of the ten-claim fixture.
pub fn data_args() -> Vec<String> {
    vec![
        "--dataset".into(),
        fixture("dataset.json").display().to_string(),
        "--knowledge-store".into(),
        fixture("knowledge_store.jsonl").display().to_string(),
        "--train-set".into(),
        fixture("train.json").display().to_string(),
    ]
}

pub fn args(extra: &[&str]) -> Vec<String> {
    let mut a = data_args();
    a.extend(extra.iter().map(|s| s.to_string()));
    a
}
