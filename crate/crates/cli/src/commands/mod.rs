//! One module per subcommand, plus small helpers they share.

pub mod calibrate;
pub mod classify;
pub mod fit_alpha;
pub mod fit_gamma;
pub mod reproduce;
pub mod scatter;
pub mod simulate;

use std::path::Path;

use oflow_core::memory_est::{acf_gamma, dfa_gamma, psd_gamma, DEFAULT_TAU_MAX};
use oflow_core::{CalibrationTable, Error, FitReport, Method, Result, SignSeries};

/// CLI-owned seed-stream tags. Core ensemble code derives per-simulation
/// seeds from small (replicate, point) indices; starting the CLI's tags
/// beyond 2^32 keeps the two spaces disjoint.
pub(crate) const TAG_SCATTER_EVAL: u64 = (1 << 32) + 1;
pub(crate) const TAG_HELD_OUT: u64 = (1 << 32) + 2;
pub(crate) const TAG_CONSISTENCY: u64 = (1 << 32) + 3;
pub(crate) const TAG_HOMOGENEOUS: u64 = (1 << 32) + 4;
pub(crate) const TAG_HETEROGENEOUS: u64 = (1 << 32) + 5;

/// Runs one estimation method on a sign series.
pub(crate) fn estimate_series(
    method: Method,
    series: &SignSeries,
    tau_max: u64,
) -> Result<FitReport> {
    match method {
        Method::Acf => acf_gamma(series, tau_max),
        Method::Psd => psd_gamma(series),
        Method::Dfa => dfa_gamma(series, None),
    }
}

pub(crate) fn estimate_signs(method: Method, signs: Vec<i8>) -> Result<FitReport> {
    let n = signs.len();
    let series = SignSeries { signs, day_of_tick: vec![0; n] };
    estimate_series(method, &series, DEFAULT_TAU_MAX)
}

/// Loads a calibration table and checks it matches the requested method.
pub(crate) fn load_calibration(path: &Path, expected: Method) -> Result<CalibrationTable> {
    let text = std::fs::read_to_string(path)?;
    let table: CalibrationTable = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidParameter(format!("calibration {}: {e}", path.display()))
    })?;
    if table.method != expected {
        return Err(Error::InvalidParameter(format!(
            "calibration {}: table was calibrated for the {:?} method, not {:?}",
            path.display(),
            table.method,
            expected
        )));
    }
    Ok(table)
}
