//! Command-line front end: ingest, retrieve, verify, evaluate and cache
//! management over the `factcheck-core` pipeline.
//!
//! Exit codes are 0 on success, 1 on runtime failure and 2 on usage or
//! validation errors.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod store;

use factcheck_core::Error;

pub use args::Cli;
pub use config::AppConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, configuration or input files.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),

    /// One or more claims failed; details are in the error records.
    #[error("{failed} of {total} claims failed")]
    ClaimFailures { failed: usize, total: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Validation(_) | Error::Config(_) | Error::Json { .. } => 2,
                Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => 2,
                _ => 1,
            },
            CliError::ClaimFailures { .. } | CliError::Io { .. } => 1,
        }
    }
}

/// Runs `cli` against the process environment and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let env: Vec<(String, String)> = std::env::vars().collect();
    match run_with_env(cli, &env) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_with_env(cli: Cli, env: &[(String, String)]) -> Result<(), CliError> {
    let config = config::load(&cli.global, env)?;
    let jobs = cli.global.jobs.unwrap_or(0);
    if cli.global.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| commands::dispatch(&cli.command, &config))
}
