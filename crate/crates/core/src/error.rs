use std::path::PathBuf;

use thiserror::Error;

use crate::entropy::CorrelationSums;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    /// Fewer than two templates survive eligibility filtering.
    #[error("insufficient patterns: {found} template(s), need at least 2")]
    InsufficientPatterns { found: usize },

    /// No pair of m-templates lies within tolerance; the entropy is undefined.
    #[error("no template matches within tolerance (B = 0)")]
    NoMatches(CorrelationSums),

    /// m-templates match but none of the extended templates do; the entropy
    /// diverges. The sums are carried so callers can pick a policy.
    #[error("no extended template matches (A = 0, B = {})", .0.b)]
    NoExtendedMatches(CorrelationSums),

    #[error("oracle refuses graphs with {n} nodes (limit {limit})")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("node {node} has zero degree")]
    DegenerateDegree { node: usize },

    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    #[error("format error: {0}")]
    FormatError(String),

    #[error("graph has no edges above the weight cutoff")]
    EmptyGraph,

    #[error("sensor {sensor}: grid point at t={time} is not bracketed by raw samples")]
    CoverageError { sensor: String, time: i64 },

    #[error("failed to write {path}: {source}")]
    WriteError {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to read {path}: {source}")]
    ReadError {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for the errors that signal an undefined entropy value rather
    /// than bad input.
    pub fn is_undefined_entropy(&self) -> bool {
        matches!(
            self,
            Error::NoMatches(_) | Error::NoExtendedMatches(_) | Error::InsufficientPatterns { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSize(_) => "InvalidSize",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidEdge(_) => "InvalidEdge",
            Error::InsufficientPatterns { .. } => "InsufficientPatterns",
            Error::NoMatches(_) => "NoMatches",
            Error::NoExtendedMatches(_) => "NoExtendedMatches",
            Error::OracleTooLarge { .. } => "OracleTooLarge",
            Error::DegenerateDegree { .. } => "DegenerateDegree",
            Error::ParseError { .. } => "ParseError",
            Error::FormatError(_) => "FormatError",
            Error::EmptyGraph => "EmptyGraph",
            Error::CoverageError { .. } => "CoverageError",
            Error::WriteError { .. } => "WriteError",
            Error::ReadError { .. } => "ReadError",
        }
    }
}
