//! Verification suites for `rnc-core`, driven by TOML configuration and
//! reporting JSON lines or CSV.

pub mod chart;
pub mod config;
pub mod expr;
pub mod report;
pub mod suites;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{component}: column {column}: {message}")]
    Parse {
        component: String,
        column: usize,
        message: String,
    },
    #[error("chart: {0}")]
    Chart(String),
    #[error("unknown suite '{0}' (see `rnc list-suites`)")]
    UnknownSuite(String),
    #[error(transparent)]
    Geometry(#[from] rnc_core::GeomError),
}

/// Every check passed.
pub const EXIT_PASS: i32 = 0;
/// At least one check failed.
pub const EXIT_FAIL: i32 = 1;
/// The configuration or chart could not be used.
pub const EXIT_CONFIG: i32 = 2;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Geometry(_) => EXIT_FAIL,
            _ => EXIT_CONFIG,
        }
    }
}
