//! File formats, report emitters and parallel drivers around
//! [`urllc_ec_core`].
//!
//! Scenarios are JSON objects; see [`load_scenario`]. Everything the `urllc-ec`
//! binary prints is produced by the functions in [`report`], [`sweep`],
//! [`table`] and [`simulate`], so the same text can be generated from tests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use urllc_ec_core::{Scenario, ScenarioSpec};

pub mod report;
pub mod simulate;
pub mod sweep;
pub mod table;

/// Environment variable overriding the worker count for sweeps and simulation.
pub const THREADS_ENV: &str = "URLLC_EC_THREADS";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        #[source]
        source: urllc_ec_core::Error,
    },
}

/// Parses scenario JSON without touching the filesystem. `origin` only
/// labels errors.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<Scenario, LoadError> {
    let spec: ScenarioSpec = serde_json::from_str(text).map_err(|source| LoadError::Parse {
        path: origin.to_path_buf(),
        source,
    })?;
    Scenario::from_spec(spec).map_err(|source| LoadError::Invalid {
        path: origin.to_path_buf(),
        source,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}

/// The scenario's given fields as pretty JSON. Derived quantities are not
/// written back, so loading the output reproduces the same scenario.
pub fn to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario.spec()).expect("scenario spec is always serializable")
}

#[derive(Debug, Error)]
#[error("{THREADS_ENV}={value:?} is not a positive integer")]
pub struct ThreadsError {
    pub value: String,
}

/// A rayon pool sized by [`THREADS_ENV`], or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool, ThreadsError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return Err(ThreadsError { value }),
        }
    }
    Ok(builder.build().expect("thread pool construction"))
}

/// Fixed-width scientific notation with 12 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}
