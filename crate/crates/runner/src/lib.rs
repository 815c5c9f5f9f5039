//! Scenario runner for the nlslab numerical core: configuration files,
//! initial-data presets, diagnostic CSV output and the acceptance suites.

pub mod acceptance;
pub mod checkpoint;
pub mod config;
pub mod preset;
pub mod record;
pub mod scenario;
pub mod suite;

use std::io;
use std::path::{Path, PathBuf};

pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use scenario::{run, simulate, RunArtifacts, RunSummary};
pub use suite::{run_suite, SuiteReport};

/// Environment variable that overrides the default output directory.
pub const OUT_ENV: &str = "NLSLAB_OUT";

/// Exit code for configuration, usage and I/O errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit code for a suite with at least one failing member.
pub const EXIT_SUITE_FAILED: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] nlslab::Error),
    #[error("preset: {0}")]
    Preset(String),
    #[error("unknown suite {0:?}; known suites are acceptance, strichartz, morawetz-ensemble")]
    UnknownSuite(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Pool(String),
}

impl RunnerError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}

/// Output directory: the explicit choice, else `$NLSLAB_OUT`, else
/// `nlslab-out` in the working directory.
pub fn output_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("nlslab-out"),
    }
}
