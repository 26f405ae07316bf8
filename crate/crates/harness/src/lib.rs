//! Seeded batch experiment runner and CLI for the jagged landscape toolkit.
//!
//! Every experiment is a pure function of (parameters, base seed): replicate
//! `i` runs on `derive_seed(base, i)`, results are assembled in replicate
//! order no matter how they were scheduled, and CSV floats use the shortest
//! round-trip representation, so a rerun reproduces output files byte for
//! byte at any worker count.

use std::path::Path;
use thiserror::Error;

pub mod cli;
pub mod config;
pub mod experiments;

/// Failures grouped by exit code: usage 1, validation 2, numerical 3.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("could not access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Validation(_) | HarnessError::Io { .. } => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

pub(crate) fn validation(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Validation(e.to_string())
}

pub(crate) fn numerical(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Numerical(e.to_string())
}

/// Shortest round-trip decimal for a float; infinities print as `inf`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<(), HarnessError> {
    std::fs::write(path, content).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}
