//! Sample autocorrelation of sign series and the ACF-side gamma pipeline:
//! raw ACF, tentative exponential-plus-power fit, fit-window thresholds,
//! logarithmic smoothing, the window power-law fit, and the prefactor
//! integral.
//!
//! For a +/-1 series the lag sum Sum_t e(t)e(t+tau) equals
//! (N - tau) - 2 * (mismatches at lag tau), so the ACF reduces to Hamming
//! distances between the bit-packed series and its shift. That keeps the
//! computation exact in integer arithmetic at any length, bit-stable, and
//! fast via hardware population counts when available.

use crate::error::{Error, Result};
use crate::memory_est::rls::{
    nelder_mead, rls_powerlaw_fit, SIMPLEX_FTOL, SIMPLEX_MAX_ITER,
};
use crate::memory_est::types::{Acf, Diagnostics, FitReport, Method, TentativeFit};
use crate::numeric::trapezoid;
use crate::order_tape::SignSeries;

/// Default largest lag of the sample ACF.
pub const DEFAULT_TAU_MAX: u64 = 10_000;

/// Default logarithmic smoothing window parameter.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Exponential-over-power ratio below which the power law is considered
/// dominant when picking the lower fit threshold.
const THRESHOLD_EPSILON: f64 = 0.1;

// ====================================================================
// Bit-packed lag kernel
// ====================================================================

fn pack_bits(signs: &[i8]) -> Vec<u64> {
    // Two zero words of padding keep every shifted read in bounds.
    let mut words = vec![0u64; signs.len().div_ceil(64) + 2];
    for (t, &s) in signs.iter().enumerate() {
        if s > 0 {
            words[t / 64] |= 1u64 << (t % 64);
        }
    }
    words
}

/// Counts positions t in [0, n - tau) where bit t and bit t + tau differ.
#[inline(always)]
fn mismatches_impl(words: &[u64], n: usize, tau: usize) -> u64 {
    let (q, r) = (tau / 64, (tau % 64) as u32);
    let valid = n - tau;
    let full = valid / 64;
    let rem = (valid % 64) as u32;
    let mut count = 0u64;
    if r == 0 {
        for i in 0..full {
            count += (words[i] ^ words[i + q]).count_ones() as u64;
        }
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            count += ((words[full] ^ words[full + q]) & mask).count_ones() as u64;
        }
    } else {
        for i in 0..full {
            let shifted = (words[i + q] >> r) | (words[i + q + 1] << (64 - r));
            count += (words[i] ^ shifted).count_ones() as u64;
        }
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            let shifted = (words[full + q] >> r) | (words[full + q + 1] << (64 - r));
            count += ((words[full] ^ shifted) & mask).count_ones() as u64;
        }
    }
    count
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn mismatches_popcnt(words: &[u64], n: usize, tau: usize) -> u64 {
    mismatches_impl(words, n, tau)
}

fn popcnt_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("popcnt")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

fn lagged_mismatches(words: &[u64], n: usize, tau: usize, use_popcnt: bool) -> u64 {
    #[cfg(target_arch = "x86_64")]
    if use_popcnt {
        // SAFETY: the caller checked the popcnt feature at runtime.
        return unsafe { mismatches_popcnt(words, n, tau) };
    }
    let _ = use_popcnt;
    mismatches_impl(words, n, tau)
}

// ====================================================================
// Sample ACF
// ====================================================================

/// Sample ACF C(tau) = (1/(N - tau)) Sum_t e(t) e(t + tau) for
/// tau = 1..=tau_max, without mean subtraction (sign symmetry assumed).
pub fn sample_acf(series: &SignSeries, tau_max: u64) -> Result<Acf> {
    let n = series.n_events() as u64;
    if tau_max < 1 {
        return Err(Error::InvalidParameter("tau_max must be >= 1".into()));
    }
    if n <= tau_max {
        return Err(Error::InsufficientData(format!(
            "ACF to lag {tau_max} needs more than {tau_max} events, got {n}"
        )));
    }
    if series.signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::InvalidParameter(
            "sign series must contain only +1 and -1".into(),
        ));
    }
    let words = pack_bits(&series.signs);
    let use_popcnt = popcnt_available();
    let n_usize = n as usize;
    let lags: Vec<u64> = (1..=tau_max).collect();
    let values: Vec<f64> = lags
        .iter()
        .map(|&tau| {
            let valid = n - tau;
            let mismatches = lagged_mismatches(&words, n_usize, tau as usize, use_popcnt);
            (valid as f64 - 2.0 * mismatches as f64) / valid as f64
        })
        .collect();
    Ok(Acf { lags, values, n_events: n })
}

// ====================================================================
// Logarithmic smoothing
// ====================================================================

/// Smooths an ACF by averaging over the integer lags in the half-open
/// logarithmic window (floor(tau * 10^(-delta/2)), floor(tau * 10^(+delta/2))],
/// clamped to the available lags; the uniform weight over that window makes
/// the average mass-preserving, and an empty window degenerates to the lag
/// itself.
///
/// The window always contains tau, so at small lags (tau <= 16 for
/// delta = 0.05) it degenerates to {tau} and smoothing is the identity.
pub fn log_smooth(acf: &Acf, delta: f64) -> Result<Acf> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing delta must be positive, got {delta}"
        )));
    }
    let tau_max = acf.tau_max();
    let lo_factor = 10f64.powf(-delta / 2.0);
    let hi_factor = 10f64.powf(delta / 2.0);
    // Prefix sums give every window mean in O(1).
    let mut prefix = Vec::with_capacity(acf.values.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in &acf.values {
        acc += v;
        prefix.push(acc);
    }
    let values = acf
        .lags
        .iter()
        .map(|&tau| {
            let mut lo = ((tau as f64 * lo_factor).floor() as u64 + 1).clamp(1, tau_max);
            let mut hi = ((tau as f64 * hi_factor).floor() as u64).clamp(1, tau_max);
            if lo > hi {
                lo = tau;
                hi = tau;
            }
            let width = (hi - lo + 1) as f64;
            (prefix[hi as usize] - prefix[(lo - 1) as usize]) / width
        })
        .collect();
    Ok(Acf { lags: acf.lags.clone(), values, n_events: acf.n_events })
}

// ====================================================================
// Tentative fit and thresholds
// ====================================================================

/// Largest lag entering the tentative fit and the threshold scans.
const TENTATIVE_TAU_MAX: u64 = 1000;

/// Log-log least squares of the positive values over an inclusive lag
/// range, as (exponent, scale at tau = 1); `None` with too few points.
fn tail_powerlaw(ys: &[f64], range: std::ops::RangeInclusive<usize>) -> Option<(f64, f64)> {
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for t in range {
        let y = ys[t - 1];
        if y > 0.0 {
            lx.push((t as f64).ln());
            ly.push(y.ln());
        }
    }
    if lx.len() < 5 {
        return None;
    }
    let (slope, intercept) = crate::numeric::ols(&lx, &ly).ok()?;
    Some(((-slope).clamp(0.01, 3.0), intercept.exp().max(1e-12)))
}

/// Fits C(tau) = c0_exp exp(-tau/tau_temp) + c1 tau^(-gamma_temp) on raw
/// lags 1..=1000 by relative least squares, to separate the short-range
/// structure from the power-law tail.
///
/// The exponential amplitude is signed: short lags can sit above the
/// power law (a decaying transient) or below its extrapolation (the
/// pre-asymptotic bend of a long-memory series, whose correlations grow
/// into the power law only beyond a crossover lag). The power-law
/// amplitude and the decay time stay positive via log parameterization.
/// The simplex descends from several deterministic starting points, one
/// per regime, and the converged fit with the lowest cost wins.
pub fn tentative_fit(acf: &Acf) -> Result<TentativeFit> {
    if acf.tau_max() < TENTATIVE_TAU_MAX {
        return Err(Error::InsufficientData(format!(
            "tentative fit needs lags to {TENTATIVE_TAU_MAX}, have {}",
            acf.tau_max()
        )));
    }
    let taus: Vec<f64> = (1..=TENTATIVE_TAU_MAX).map(|t| t as f64).collect();
    let ys: Vec<f64> = acf.values[..TENTATIVE_TAU_MAX as usize].to_vec();

    // The relative cost is undefined at nonpositive model values, so
    // parameter sets whose model dips below zero anywhere in the fit
    // range are rejected outright.
    let cost = |p: &[f64]| -> f64 {
        let (c0, tau_t, c1, gamma_t) = (p[0], p[1].exp(), p[2].exp(), p[3]);
        let mut acc = 0.0;
        for (&tau, &y) in taus.iter().zip(&ys) {
            let f = c0 * (-tau / tau_t).exp() + c1 * tau.powf(-gamma_t);
            if !(f > 0.0) {
                return f64::INFINITY;
            }
            let r = (y - f) / f;
            acc += r * r;
        }
        acc
    };

    // Start 1, positive transient: power law from the mid-range slope
    // with a robust (median) scale, exponential from the short-lag excess
    // over it.
    let (mut gamma_mid, mut c1_mid) = (0.5, ys[999].abs().max(1e-8));
    if let Some((g, _)) = tail_powerlaw(&ys, 100..=1000) {
        gamma_mid = g;
        let mut scales: Vec<f64> = (100..=1000)
            .filter(|&t| ys[t - 1] > 0.0)
            .map(|t| ys[t - 1] * (t as f64).powf(gamma_mid))
            .collect();
        if !scales.is_empty() {
            scales.sort_unstable_by(f64::total_cmp);
            c1_mid = scales[scales.len() / 2].max(1e-12);
        }
    }
    let (mut c0_excess, mut tau_excess) = ((ys[0] - c1_mid).max(1e-3), 5.0);
    {
        let (mut xs, mut lr) = (Vec::new(), Vec::new());
        for t in 1..=30usize {
            let r = ys[t - 1] - c1_mid * (t as f64).powf(-gamma_mid);
            if r > 0.0 {
                xs.push(t as f64);
                lr.push(r.ln());
            }
        }
        if xs.len() >= 3 {
            if let Ok((slope, intercept)) = crate::numeric::ols(&xs, &lr) {
                if slope < 0.0 {
                    tau_excess = (-1.0 / slope).clamp(0.5, 500.0);
                    c0_excess = intercept.exp();
                }
            }
        }
    }

    // Start 2, pre-asymptotic bend: power law from the last half-decade,
    // signed exponential amplitude from the lag-1 deficit against it.
    // Noise at these lags can swamp single values, so the tail estimate
    // comes from log-bin means (each averaging hundreds of lags) when
    // enough bins stay positive. The decay time follows the lag where the
    // data first reaches half the power law, which tracks the crossover
    // scale of a bent curve; the start is then shortened until the model
    // is positive throughout.
    let (gamma_tail, c1_tail) = {
        let edges = [300usize, 465, 720, 1000];
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mean = ys[lo - 1..hi].iter().sum::<f64>() / (hi - lo) as f64;
            if mean > 0.0 {
                lx.push(((lo * hi) as f64).sqrt().ln());
                ly.push(mean.ln());
            }
        }
        let binned = if lx.len() >= 2 {
            crate::numeric::ols(&lx, &ly)
                .ok()
                .map(|(s, i)| ((-s).clamp(0.01, 3.0), i.exp().max(1e-12)))
        } else {
            None
        };
        binned
            .or_else(|| tail_powerlaw(&ys, 300..=1000))
            .unwrap_or((gamma_mid, c1_mid))
    };
    let c0_deficit = ys[0] - c1_tail;
    let mut tau_deficit = 5.0;
    if c0_deficit < 0.0 {
        tau_deficit = 150.0;
        for t in 2..=800usize {
            if ys[t - 1] >= 0.5 * c1_tail * (t as f64).powf(-gamma_tail) {
                tau_deficit = (t as f64).clamp(2.0, 500.0);
                break;
            }
        }
    }
    let bend_start = |mut tau_d: f64| -> [f64; 4] {
        while tau_d > 1.0
            && cost(&[c0_deficit, tau_d.ln(), c1_tail.ln(), gamma_tail]).is_infinite()
        {
            tau_d *= 0.7;
        }
        [c0_deficit, tau_d.ln(), c1_tail.ln(), gamma_tail]
    };

    // Start 3, pure power law over the whole range, no exponential.
    let (gamma_all, c1_all) = tail_powerlaw(&ys, 1..=1000).unwrap_or((gamma_mid, c1_mid));

    let starts: [[f64; 4]; 3] = [
        [c0_excess, tau_excess.ln(), c1_mid.ln(), gamma_mid],
        bend_start(tau_deficit),
        [0.0, 5f64.ln(), c1_all.ln(), gamma_all],
    ];
    let mut best: Option<(f64, [f64; 4])> = None;
    for start in &starts {
        // The amplitude axis is linear, so its step follows the scale of
        // the start itself rather than a fixed log step.
        let c0_step = 0.5 * start[0].abs().max(0.1 * start[2].exp());
        let steps = [c0_step, 0.7, 0.7, 0.1];
        let outcome = nelder_mead(&cost, start, &steps, SIMPLEX_FTOL, SIMPLEX_MAX_ITER);
        if outcome.converged && outcome.cost.is_finite() {
            let point = [
                outcome.point[0],
                outcome.point[1],
                outcome.point[2],
                outcome.point[3],
            ];
            if best.is_none_or(|(c, _)| outcome.cost < c) {
                best = Some((outcome.cost, point));
            }
        }
    }
    let Some((residual, p)) = best else {
        return Err(Error::EstimationFailed(format!(
            "tentative fit did not converge in {SIMPLEX_MAX_ITER} iterations \
             from any starting point (starts {starts:?})"
        )));
    };
    Ok(TentativeFit {
        c0_exp: p[0],
        tau_temp: p[1].exp(),
        c1: p[2].exp(),
        gamma_temp: p[3],
        residual,
    })
}

/// Smallest lag in [10, 100] where the fitted exponential is down to a
/// tenth of the fitted power law; 100 when it never is.
pub fn lower_threshold(fit: &TentativeFit) -> u64 {
    for tau in 10..=100u64 {
        let t = tau as f64;
        let exp_part = fit.c0_exp * (-t / fit.tau_temp).exp();
        let pow_part = fit.c1 * t.powf(-fit.gamma_temp);
        let ratio = (exp_part / pow_part).abs();
        if ratio < THRESHOLD_EPSILON {
            return tau;
        }
    }
    100
}

/// Upper fit threshold: the first lag >= 1000 where the smoothed ACF dips
/// below the noise floor 1/sqrt(N), capped by 100 times the lower
/// threshold.
pub fn upper_threshold(smoothed: &Acf, tau_lower: u64) -> Result<u64> {
    let tau_max = smoothed.tau_max();
    if tau_max < TENTATIVE_TAU_MAX {
        return Err(Error::InsufficientData(format!(
            "upper threshold needs lags to {TENTATIVE_TAU_MAX}, have {tau_max}"
        )));
    }
    let floor = 1.0 / (smoothed.n_events as f64).sqrt();
    let tau_stat = (TENTATIVE_TAU_MAX..=tau_max)
        .find(|&tau| smoothed.value_at(tau) < floor)
        .unwrap_or(tau_max);
    Ok(tau_stat.min(100 * tau_lower))
}

// ====================================================================
// Prefactor and the full pipeline
// ====================================================================

/// Prefactor c0 of C(tau) ~ c0 tau^(-gamma), recovered by matching the
/// trapezoidal integral of the smoothed ACF over the fit window to the
/// analytic integral of the power law.
pub fn acf_prefactor(smoothed: &Acf, gamma: f64, window: (u64, u64)) -> f64 {
    let (lo, hi) = window;
    let xs: Vec<f64> = (lo..=hi).map(|t| t as f64).collect();
    let ys: Vec<f64> = (lo..=hi).map(|t| smoothed.value_at(t)).collect();
    let integral = trapezoid(&xs, &ys);
    let (lo, hi) = (lo as f64, hi as f64);
    if (1.0 - gamma).abs() < 1e-8 {
        // Limit of the normalization as gamma -> 1.
        integral / (hi / lo).ln()
    } else {
        integral * (1.0 - gamma) / (hi.powf(1.0 - gamma) - lo.powf(1.0 - gamma))
    }
}

/// ACF-method gamma estimate starting from a precomputed sample ACF:
/// tentative fit, thresholds, smoothing, window power-law fit, prefactor.
pub fn gamma_from_acf(acf: &Acf) -> Result<FitReport> {
    let tentative = tentative_fit(acf)?;
    let tau_lower = lower_threshold(&tentative);
    let smoothed = log_smooth(acf, DEFAULT_DELTA)?;
    let tau_upper = upper_threshold(&smoothed, tau_lower)?;
    let points: Vec<(f64, f64)> = (tau_lower..=tau_upper)
        .map(|t| (t as f64, smoothed.value_at(t)))
        .collect();
    let fit = rls_powerlaw_fit(&points, (tau_lower as f64, tau_upper as f64))?;
    if fit.exponent < 0.0 {
        return Err(Error::EstimationFailed(format!(
            "ACF fit returned negative memory exponent {:.4}",
            fit.exponent
        )));
    }
    let c0 = acf_prefactor(&smoothed, fit.exponent, (tau_lower, tau_upper));
    Ok(FitReport {
        method: Method::Acf,
        gamma: fit.exponent,
        c0: Some(c0),
        window: (tau_lower as f64, tau_upper as f64),
        diagnostics: Diagnostics {
            tentative: Some(tentative),
            scale: fit.scale,
            residual: fit.residual,
            iterations: fit.iterations,
            dropped_points: fit.dropped,
            n_points: fit.n_points,
        },
    })
}

/// Full ACF-method pipeline from a sign series.
pub fn acf_gamma(series: &SignSeries, tau_max: u64) -> Result<FitReport> {
    let acf = sample_acf(series, tau_max)?;
    gamma_from_acf(&acf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn series_of(signs: Vec<i8>) -> SignSeries {
        let n = signs.len();
        SignSeries { signs, day_of_tick: vec![0; n] }
    }

    fn synthetic_acf(n_events: u64, tau_max: u64, f: impl Fn(f64) -> f64) -> Acf {
        let lags: Vec<u64> = (1..=tau_max).collect();
        let values = lags.iter().map(|&t| f(t as f64)).collect();
        Acf { lags, values, n_events }
    }

    #[test]
    fn acf_handles_tiny_examples() {
        let all_plus = series_of(vec![1; 16]);
        let acf = sample_acf(&all_plus, 4).unwrap();
        assert!(acf.values.iter().all(|&v| v == 1.0));

        let alternating = series_of((0..16).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect());
        let acf = sample_acf(&alternating, 2).unwrap();
        assert_eq!(acf.value_at(1), -1.0);
        assert_eq!(acf.value_at(2), 1.0);

        // {+, +, -, +} at lag 1: (1 - 1 - 1)/3.
        let acf = sample_acf(&series_of(vec![1, 1, -1, 1]), 1).unwrap();
        assert!((acf.value_at(1) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn acf_input_validation() {
        assert!(sample_acf(&series_of(vec![1; 10]), 10).is_err());
        assert!(sample_acf(&series_of(vec![1; 10]), 0).is_err());
        let mut bad = vec![1i8; 10];
        bad[3] = 0;
        assert!(sample_acf(&series_of(bad), 2).is_err());
    }

    #[test]
    fn bit_kernel_matches_direct_summation() {
        // The packed-word kernel must agree with naive O(N tau) summation
        // exactly, across word-boundary lags.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let signs: Vec<i8> =
            (0..5000).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let series = series_of(signs.clone());
        let acf = sample_acf(&series, 200).unwrap();
        for tau in 1..=200usize {
            let direct: i64 = (0..signs.len() - tau)
                .map(|t| i64::from(signs[t]) * i64::from(signs[t + tau]))
                .sum();
            let expected = direct as f64 / (signs.len() - tau) as f64;
            assert_eq!(acf.value_at(tau as u64), expected, "lag {tau}");
        }
    }

    #[test]
    fn smoothing_identity_and_constant() {
        let acf = synthetic_acf(1_000_000, 100, |_| 0.25);
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        assert_eq!(smoothed.values, acf.values);

        // Small lags have single-lag windows: identity on any input.
        let acf = synthetic_acf(1_000_000, 50, |t| t.sin());
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        assert_eq!(smoothed.value_at(1), acf.value_at(1));
        assert_eq!(smoothed.value_at(5), acf.value_at(5));

        assert!(log_smooth(&acf, 0.0).is_err());
    }

    #[test]
    fn smoothing_matches_brute_force_window() {
        let acf = synthetic_acf(1_000_000, 2000, |t| t.powf(-0.5));
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        // Window at tau = 1000: lags in (floor(1000*10^(-0.025)), floor(1000*10^(0.025))].
        let lo = (1000.0 * 10f64.powf(-0.025)).floor() as u64 + 1;
        let hi = (1000.0 * 10f64.powf(0.025)).floor() as u64;
        assert_eq!((lo, hi), (945, 1059));
        let brute: f64 = (lo..=hi).map(|t| (t as f64).powf(-0.5)).sum::<f64>()
            / (hi - lo + 1) as f64;
        assert!((smoothed.value_at(1000) - brute).abs() < 1e-12);
    }

    #[test]
    fn tentative_fit_recovers_mixture() {
        let acf =
            synthetic_acf(100_000_000, 1000, |t| (-t / 5.0).exp() + 0.5 * t.powf(-0.5));
        let fit = tentative_fit(&acf).unwrap();
        assert!((fit.c0_exp - 1.0).abs() < 0.05, "c0 {}", fit.c0_exp);
        assert!((fit.tau_temp - 5.0).abs() < 0.25, "tau {}", fit.tau_temp);
        assert!((fit.c1 - 0.5).abs() < 0.025, "c1 {}", fit.c1);
        assert!((fit.gamma_temp - 0.5).abs() < 0.025, "gamma {}", fit.gamma_temp);
        assert_eq!(lower_threshold(&fit), 23);
    }

    #[test]
    fn tentative_fit_degenerate_components() {
        let power = synthetic_acf(100_000_000, 1000, |t| 0.4 * t.powf(-0.6));
        let fit = tentative_fit(&power).unwrap();
        let exp_at_10 = fit.c0_exp * (-10.0 / fit.tau_temp).exp();
        assert!(exp_at_10.abs() < 0.01, "exp part {exp_at_10}");
        assert!((fit.gamma_temp - 0.6).abs() < 0.03, "gamma {}", fit.gamma_temp);
        assert_eq!(lower_threshold(&fit), 10);

        let exponential = synthetic_acf(100_000_000, 1000, |t| (-t / 8.0).exp());
        let fit = tentative_fit(&exponential).unwrap();
        let pow_at_500 = fit.c1 * 500f64.powf(-fit.gamma_temp);
        assert!(pow_at_500.abs() < 0.01, "power part {pow_at_500}");
    }

    #[test]
    fn lower_threshold_oracle_and_fallback() {
        // Exact mixture parameters: first lag with ratio below 0.1 is 23.
        let exact = TentativeFit {
            c0_exp: 1.0,
            tau_temp: 5.0,
            c1: 0.5,
            gamma_temp: 0.5,
            residual: 0.0,
        };
        assert_eq!(lower_threshold(&exact), 23);

        // A very slow exponential dominates through lag 100.
        let slow = TentativeFit {
            c0_exp: 1.0,
            tau_temp: 500.0,
            c1: 0.01,
            gamma_temp: 0.5,
            residual: 0.0,
        };
        assert_eq!(lower_threshold(&slow), 100);

        let no_exp = TentativeFit {
            c0_exp: 0.0,
            tau_temp: 5.0,
            c1: 0.5,
            gamma_temp: 0.5,
            residual: 0.0,
        };
        assert_eq!(lower_threshold(&no_exp), 10);
    }

    #[test]
    fn upper_threshold_rules() {
        // Smoothed ACF always above the noise floor: capped by
        // 100 * tau_lower = 1000.
        let acf = synthetic_acf(1_000_000, 10_000, |t| t.powf(-0.3));
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        assert_eq!(upper_threshold(&smoothed, 10).unwrap(), 1000);
        // Larger lower threshold: the statistical cap (here tau_max) rules.
        assert_eq!(upper_threshold(&smoothed, 100).unwrap(), 10_000);

        // White noise at N = 1e6: already below 1/sqrt(N) at lag 1000.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let signs: Vec<i8> =
            (0..1_000_000).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let acf = sample_acf(&series_of(signs), 10_000).unwrap();
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        assert_eq!(upper_threshold(&smoothed, 100).unwrap(), 1000);
    }

    #[test]
    fn prefactor_is_self_inverse() {
        let acf = synthetic_acf(100_000_000, 10_000, |t| 0.8 * t.powf(-0.5));
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        let c0 = acf_prefactor(&smoothed, 0.5, (10, 1000));
        assert!((c0 - 0.8).abs() < 0.008, "c0 {c0}");

        // gamma = 1 takes the logarithmic limit.
        let acf = synthetic_acf(100_000_000, 10_000, |t| 0.3 / t);
        let smoothed = log_smooth(&acf, DEFAULT_DELTA).unwrap();
        let c0 = acf_prefactor(&smoothed, 1.0, (10, 1000));
        assert!((c0 - 0.3).abs() < 0.003, "c0 {c0}");
    }

    #[test]
    fn synthetic_pipeline_recovers_gamma_and_prefactor() {
        let acf = synthetic_acf(100_000_000, 10_000, |t| 0.8 * t.powf(-0.5));
        let report = gamma_from_acf(&acf).unwrap();
        assert!((report.gamma - 0.5).abs() < 0.005, "gamma {}", report.gamma);
        let c0 = report.c0.unwrap();
        assert!((c0 - 0.8).abs() < 0.008, "c0 {c0}");
        assert_eq!(report.window, (10.0, 1000.0));
        assert!(report.diagnostics.tentative.is_some());
    }

    #[test]
    fn growing_correlations_are_rejected() {
        // An increasing "ACF" fits a negative memory exponent, which the
        // pipeline reports as an estimation failure.
        let acf = synthetic_acf(1_000_000, 10_000, |t| 0.01 * t.powf(0.3));
        match gamma_from_acf(&acf) {
            Err(Error::EstimationFailed(_)) => {}
            other => panic!("expected estimation failure, got {other:?}"),
        }
    }
}
