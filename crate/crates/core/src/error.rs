//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by matrix validation, projection, sampling, and
/// the exhaustive enumeration routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition (shape mismatch, bad
    /// tolerance, mapping outside the target carrier, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// A scene point lies in the focal plane: its third coordinate is
    /// too close to zero for perspective division.
    #[error("point {col} lies in the focal plane (|z| = {value:.3e})")]
    FocalPlane { col: usize, value: f64 },

    /// The transformed configuration leaves the projectable class: a
    /// perspective denominator vanished.
    #[error("degenerate view: denominator {value:.3e} at column {col}")]
    DegenerateView { col: usize, value: f64 },

    /// Rejection sampling did not find a matrix in the requested class.
    #[error("sampler gave up after {attempts} attempts; tolerances may be pathological")]
    SamplerFailure { attempts: u32 },

    /// The carrier is too large for exhaustive permutation enumeration.
    #[error("structure has {size} elements; exhaustive enumeration capped at {max}")]
    SizeLimit { size: usize, max: usize },

    /// A computation finished but violated its own postcondition.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File or JSON parsing failed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
