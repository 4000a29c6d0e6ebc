//! Crate-wide error type.
//!
//! Variants are grouped by how a caller should react: configuration problems
//! (bad parameters, bad windows, malformed input format) are recoverable by
//! fixing the invocation; estimation problems (insufficient or degenerate
//! data, non-convergent fits, singular inversions) are properties of the data
//! and should be reported, not retried; I/O problems carry the OS error.

use thiserror::Error;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Session window list is empty, unordered, or overlapping.
    #[error("invalid session windows: {0}")]
    InvalidWindows(String),

    /// Input stream does not match the expected tape format, or more than
    /// the tolerated fraction of rows is malformed.
    #[error("tape format: {0}")]
    TapeFormat(String),

    /// An operation that needs at least one event or sample received none.
    #[error("empty series: {0}")]
    EmptySeries(String),

    /// Data volume is below the operation's stated minimum.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An estimator produced an out-of-domain result or failed to converge.
    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    /// The requested inversion is singular at the given exponent.
    #[error("singular estimator: {0}")]
    Singularity(String),

    /// Too many ensemble points failed during calibration.
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True when the error indicates a caller-side configuration problem.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::InvalidWindows(_) | Error::TapeFormat(_)
        )
    }

    /// True when the error indicates a data-dependent estimation failure.
    pub fn is_estimation(&self) -> bool {
        matches!(
            self,
            Error::EmptySeries(_)
                | Error::InsufficientData(_)
                | Error::EstimationFailed(_)
                | Error::Singularity(_)
                | Error::CalibrationFailed(_)
        )
    }
}
