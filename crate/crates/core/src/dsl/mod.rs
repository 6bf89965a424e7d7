//! Metric file format, JSON reports, CSV trajectories and the `gcw` CLI.
//!
//! ```text
//! # comment
//! dim 3
//! coords u v x
//! params a                 # optional
//! signature lorentzian     # optional, lorentzian | riemannian
//! basepoint 0 0 1/2        # optional, defaults to the origin
//! g u u = -2*a*u*x^2       # indices by name or 0-based number
//! g u v = -1               # g v u is implied
//! g x x = 1
//! ```

mod cli;
mod format;
mod report;

use thiserror::Error;

pub use cli::{cli_main, parse_matrix, EXIT_DEGENERATE, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
pub use format::{emit_metric, emit_metric_file, parse_metric_file, MetricDocument, MetricEntry};
pub use report::{build_report, report_json, write_trajectory_csv, CheckOptions, ReportDocument, SCHEMA_VERSION};

/// Metric file errors. Each variant has a stable code, see [`DslError::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: duplicate {what}")]
    Duplicate { line: usize, what: String },
    #[error("line {line}, column {column}: unknown coordinate '{name}'")]
    UnknownCoordinate { line: usize, column: usize, name: String },
    #[error("line {line}: dimension mismatch: {message}")]
    DimensionMismatch { line: usize, message: String },
    #[error("missing {what}")]
    Missing { line: usize, what: String },
}

impl DslError {
    pub fn code(&self) -> &'static str {
        match self {
            DslError::Syntax { .. } => "E101",
            DslError::Duplicate { .. } => "E102",
            DslError::UnknownCoordinate { .. } => "E103",
            DslError::DimensionMismatch { .. } => "E104",
            DslError::Missing { .. } => "E105",
        }
    }
}
