//! Monte-Carlo bias calibration of the gamma estimators and the trader-count
//! inference built on the ACF prefactor.
//!
//! Naive long-memory estimates are biased at realistic series lengths. The
//! calibration simulates an ensemble of known parameter triples
//! (n_st, n_events, alpha), regresses the estimated gamma on the true
//! exponent alpha - 1, and summarizes the affine bias as (beta1, beta2).
//! A second regression (beta3, beta4) calibrates the log-form trader-count
//! estimator. `unbias` and the prefactor inversion then map measured
//! values back to model parameters.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmf_sim::{simulate_signs, SimParams};
use crate::memory_est::{
    acf_gamma, dfa_gamma, psd_gamma, FitReport, Method, DEFAULT_TAU_MAX,
};
use crate::numeric::ols;
use crate::order_tape::SignSeries;
use crate::rng::{derive_seed, stream_rng};

/// Fraction of ensemble estimations allowed to fail before the whole
/// calibration is declared invalid.
const MAX_FAILURE_FRACTION: f64 = 0.05;

/// Guard band around the gamma = 1 singularity of the trader-count
/// estimator.
const SINGULARITY_MARGIN: f64 = 1e-6;

/// One simulated parameter triple of a calibration ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePoint {
    /// Number of splitting traders (the simulation's trader count).
    pub n_st: u32,
    /// Series length.
    pub n_events: u64,
    /// Length-law exponent; the true memory exponent is alpha - 1.
    pub alpha: f64,
}

/// Affine bias summary of a gamma estimator plus the trader-count
/// regression, with the ensemble it was computed on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub method: Method,
    /// Slope of estimated gamma on (alpha - 1).
    pub beta1: f64,
    /// Intercept of that regression.
    pub beta2: f64,
    /// Slope of the log-form trader-count regression.
    pub beta3: f64,
    /// Intercept of that regression.
    pub beta4: f64,
    pub n_replicates: u32,
    pub ensemble: Vec<EnsemblePoint>,
    /// Estimations dropped across all replicates (failed fits).
    pub dropped: u32,
}

/// One ensemble estimation: the true parameters and the fit outcome
/// (`None` when the estimator failed on that realization).
#[derive(Debug, Clone)]
pub struct EnsembleOutcome {
    pub replicate: u32,
    pub point: EnsemblePoint,
    pub report: Option<FitReport>,
}

fn validate_ensemble(ensemble: &[EnsemblePoint], replicates: u32) -> Result<()> {
    if ensemble.len() < 2 {
        return Err(Error::InvalidParameter(
            "calibration needs at least 2 ensemble points".into(),
        ));
    }
    if replicates < 1 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    for p in ensemble {
        if !(p.alpha > 1.0 && p.alpha < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "ensemble alpha must lie in (1, 2), got {}",
                p.alpha
            )));
        }
        if p.n_st == 0 {
            return Err(Error::InvalidParameter("ensemble n_st must be >= 1".into()));
        }
    }
    Ok(())
}

fn estimate(method: Method, signs: Vec<i8>) -> Result<FitReport> {
    let n = signs.len();
    let series = SignSeries { signs, day_of_tick: vec![0; n] };
    match method {
        Method::Acf => acf_gamma(&series, DEFAULT_TAU_MAX),
        Method::Psd => psd_gamma(&series),
        Method::Dfa => dfa_gamma(&series, None),
    }
}

/// Simulates and estimates every (replicate, point) combination.
///
/// Simulation seeds derive from (seed, replicate, point), so outcomes do
/// not depend on scheduling; results are ordered by replicate then point.
pub fn run_gamma_ensemble(
    ensemble: &[EnsemblePoint],
    method: Method,
    replicates: u32,
    seed: u64,
) -> Result<Vec<EnsembleOutcome>> {
    validate_ensemble(ensemble, replicates)?;
    let per_replicate: Vec<Vec<EnsembleOutcome>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            ensemble
                .iter()
                .enumerate()
                .map(|(i, &point)| {
                    let params = SimParams::uniform(
                        point.n_st,
                        point.n_events,
                        point.alpha,
                        derive_seed(seed, r as u64, i as u64),
                    );
                    let report = simulate_signs(&params)
                        .and_then(|signs| estimate(method, signs))
                        .ok();
                    EnsembleOutcome { replicate: r, point, report }
                })
                .collect()
        })
        .collect();
    Ok(per_replicate.into_iter().flatten().collect())
}

/// Per-replicate OLS of y on x, averaged over replicates.
///
/// `pairs` holds (replicate, x, y); replicates with fewer than 2 points
/// are skipped.
fn replicate_mean_regression(pairs: &[(u32, f64, f64)]) -> Result<(f64, f64)> {
    let max_rep = pairs.iter().map(|&(r, _, _)| r).max();
    let Some(max_rep) = max_rep else {
        return Err(Error::CalibrationFailed("no surviving regression points".into()));
    };
    let (mut slopes, mut intercepts) = (Vec::new(), Vec::new());
    for r in 0..=max_rep {
        let xs: Vec<f64> =
            pairs.iter().filter(|p| p.0 == r).map(|p| p.1).collect();
        let ys: Vec<f64> =
            pairs.iter().filter(|p| p.0 == r).map(|p| p.2).collect();
        if xs.len() < 2 {
            continue;
        }
        if let Ok((slope, intercept)) = ols(&xs, &ys) {
            slopes.push(slope);
            intercepts.push(intercept);
        }
    }
    if slopes.is_empty() {
        return Err(Error::CalibrationFailed(
            "no replicate had enough surviving points for the regression".into(),
        ));
    }
    let n = slopes.len() as f64;
    Ok((slopes.iter().sum::<f64>() / n, intercepts.iter().sum::<f64>() / n))
}

fn check_failures(total: usize, dropped: usize) -> Result<()> {
    if dropped as f64 > MAX_FAILURE_FRACTION * total as f64 {
        return Err(Error::CalibrationFailed(format!(
            "{dropped} of {total} ensemble estimations failed \
             (tolerance {:.0}%)",
            MAX_FAILURE_FRACTION * 100.0
        )));
    }
    Ok(())
}

/// Calibrates the affine bias of a gamma estimator and the trader-count
/// regression on a simulated ensemble.
///
/// Per replicate, every ensemble point is simulated and estimated; the
/// estimated gamma is regressed on (alpha - 1) and the log-form
/// trader-count estimate on its true value. Replicate-mean coefficients
/// are reported. Failed estimations are dropped; more than 5% failures
/// invalidate the calibration.
pub fn calibrate_bias(
    ensemble: &[EnsemblePoint],
    method: Method,
    replicates: u32,
    seed: u64,
) -> Result<CalibrationTable> {
    if method == Method::Dfa {
        return Err(Error::InvalidParameter(
            "calibration tables cover the acf and psd methods only".into(),
        ));
    }
    let outcomes = run_gamma_ensemble(ensemble, method, replicates, seed)?;
    let total = outcomes.len();
    let mut gamma_pairs: Vec<(u32, f64, f64)> = Vec::new();
    let mut nst_pairs: Vec<(u32, f64, f64)> = Vec::new();
    let mut dropped = 0usize;
    for outcome in &outcomes {
        match &outcome.report {
            None => dropped += 1,
            Some(report) => {
                gamma_pairs.push((
                    outcome.replicate,
                    outcome.point.alpha - 1.0,
                    report.gamma,
                ));
                if let Some((x, y)) = nst_regression_pair(report, outcome.point.n_st) {
                    nst_pairs.push((outcome.replicate, x, y));
                }
            }
        }
    }
    check_failures(total, dropped)?;
    let (beta1, beta2) = replicate_mean_regression(&gamma_pairs)?;
    let (beta3, beta4) = replicate_mean_regression(&nst_pairs)?;
    Ok(CalibrationTable {
        method,
        beta1,
        beta2,
        beta3,
        beta4,
        n_replicates: replicates,
        ensemble: ensemble.to_vec(),
        dropped: dropped as u32,
    })
}

/// The (x, y) pair the trader-count calibration regresses: the log-form
/// estimator against the matching function of the true count.
fn nst_regression_pair(report: &FitReport, true_n_st: u32) -> Option<(f64, f64)> {
    let c0 = report.c0?;
    if !(c0 > 0.0) || report.gamma >= 1.0 - SINGULARITY_MARGIN {
        return None;
    }
    let x = nst_log_form(c0, report.gamma).ok()?;
    let y = (1.0 - report.gamma) * (true_n_st as f64).log10();
    Some((x, y))
}

/// Trader-count leg of the calibration alone; same ensemble protocol as
/// [`calibrate_bias`].
pub fn calibrate_nst(
    ensemble: &[EnsemblePoint],
    method: Method,
    replicates: u32,
    seed: u64,
) -> Result<(f64, f64)> {
    let table = calibrate_bias(ensemble, method, replicates, seed)?;
    Ok((table.beta3, table.beta4))
}

/// Removes the calibrated affine bias: (gamma - beta2) / beta1.
pub fn unbias(gamma_nlls: f64, table: &CalibrationTable) -> Result<f64> {
    if !(table.beta1 > 0.0) {
        return Err(Error::CalibrationFailed(format!(
            "calibration slope beta1 = {} is not positive",
            table.beta1
        )));
    }
    Ok((gamma_nlls - table.beta2) / table.beta1)
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (1, 2), got {alpha}"
        )));
    }
    Ok(())
}

/// ACF prefactor of the uniform-intensity splitting model:
/// c0 = 1 / (alpha * n_st^(2 - alpha)).
pub fn uniform_prefactor(alpha: f64, n_st: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    if !(n_st > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "n_st must be positive, got {n_st}"
        )));
    }
    Ok(1.0 / (alpha * n_st.powf(2.0 - alpha)))
}

/// ACF prefactor under heterogeneous trading intensities:
/// c0 = (1/alpha) * Sum_i lambda_i^(3 - alpha).
///
/// Never smaller than the uniform prefactor at the same trader count;
/// equal exactly when the intensities are uniform.
pub fn heterogeneous_prefactor(alpha: f64, intensities: &[f64]) -> Result<f64> {
    validate_alpha(alpha)?;
    if intensities.is_empty() {
        return Err(Error::InvalidParameter("empty intensity vector".into()));
    }
    if intensities.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::InvalidParameter(
            "intensities must be finite and positive".into(),
        ));
    }
    let total: f64 = intensities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "intensities sum to {total}, expected 1"
        )));
    }
    Ok(intensities.iter().map(|w| w.powf(3.0 - alpha)).sum::<f64>() / alpha)
}

/// Singularity-free log form of the trader-count estimator:
/// log10(N^(1-gamma)) = log10(1 / ((gamma + 1) c0)).
pub fn nst_log_form(c0: f64, gamma: f64) -> Result<f64> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "prefactor must be positive, got {c0}"
        )));
    }
    Ok((1.0 / ((gamma + 1.0) * c0)).log10())
}

/// Inverts the uniform prefactor into a trader count:
/// N = [1 / ((gamma + 1) c0)]^(1 / (1 - gamma)).
///
/// The exponent diverges at gamma = 1; estimates within 1e-6 of it are
/// rejected as singular.
pub fn nst_from_prefactor(c0: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if gamma >= 1.0 - SINGULARITY_MARGIN {
        return Err(Error::Singularity(format!(
            "trader-count inversion is singular at gamma = {gamma}"
        )));
    }
    let log_n = nst_log_form(c0, gamma)? / (1.0 - gamma);
    Ok(10f64.powf(log_n))
}

/// [`nst_from_prefactor`] with the calibrated affine correction
/// (beta3, beta4) applied to the log form.
pub fn nst_from_prefactor_calibrated(
    c0: f64,
    gamma: f64,
    beta3: f64,
    beta4: f64,
) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if gamma >= 1.0 - SINGULARITY_MARGIN {
        return Err(Error::Singularity(format!(
            "trader-count inversion is singular at gamma = {gamma}"
        )));
    }
    let corrected = beta3 * nst_log_form(c0, gamma)? + beta4;
    Ok(10f64.powf(corrected / (1.0 - gamma)))
}

/// Stand-in calibration ensemble: alpha uniform in (1.05, 1.95), trader
/// counts log-uniform in [50, 500], lengths log-uniform in [5e5, 5e6]
/// snapped to 5-smooth integers (which keeps the FFT stage fast).
/// Both scale parameters are sampled log-uniformly so that each decade
/// contributes equally, as in realistic cross-sections of market sizes.
pub fn standard_ensemble(n_points: usize, seed: u64) -> Vec<EnsemblePoint> {
    let smooth = five_smooth_in(500_000, 5_000_000);
    let mut rng = stream_rng(seed, u64::from(u32::MAX));
    (0..n_points)
        .map(|_| {
            let alpha = rng.random_range(1.05..1.95);
            let n_st = rng.random_range(50f64.ln()..500f64.ln()).exp().round() as u32;
            let target = (rng.random_range(500_000f64.ln()..5_000_000f64.ln())).exp();
            let n_events = *smooth
                .iter()
                .min_by(|&&a, &&b| {
                    (a as f64 - target).abs().total_cmp(&(b as f64 - target).abs())
                })
                .unwrap();
            EnsemblePoint { n_st, n_events, alpha }
        })
        .collect()
}

/// All integers in [lo, hi] with no prime factor above 5, sorted.
fn five_smooth_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p2 = 1u64;
    while p2 <= hi {
        let mut p23 = p2;
        while p23 <= hi {
            let mut p235 = p23;
            while p235 <= hi {
                if p235 >= lo {
                    out.push(p235);
                }
                p235 *= 5;
            }
            p23 *= 3;
        }
        p2 *= 2;
    }
    out.sort_unstable();
    out
}
