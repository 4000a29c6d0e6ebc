//! Periodogram estimation of the power spectral density and the PSD-side
//! gamma pipeline: one-sided periodogram, linear bin smoothing, bandwidth
//! selection, window power-law fit, and the spectral prefactor.

use realfft::RealFftPlanner;

use crate::error::{Error, Result};
use crate::memory_est::rls::rls_powerlaw_fit;
use crate::memory_est::types::{Diagnostics, FitReport, Method, Psd};
use crate::numeric::{gamma_fn, trapezoid};
use crate::order_tape::SignSeries;

/// Half-width of the uniform PSD smoothing window (2 * 5 + 1 = 11 bins).
pub const SMOOTH_HALF_WIDTH: usize = 5;

/// Lower fit threshold in grid units: omega_minus = 15 * delta_omega.
const K_LOWER: u64 = 15;

/// Bandwidth search range in grid units.
const K_SEARCH: (u64, u64) = (100, 1000);

/// One-sided periodogram of a real series.
///
/// S(omega_k) = w_k |X_k|^2 / N at omega_k = k/N for k = 1..=floor(N/2),
/// with w_k = 2 except at the Nyquist bin of an even-length series. The
/// one-sided weights make the rectangle sum Sum_k S(omega_k)/N equal the
/// population variance of the series exactly (Parseval).
pub fn periodogram_real(values: &[f64]) -> Result<Psd> {
    periodogram_owned(values.to_vec())
}

/// One-sided periodogram of a sign series.
pub fn periodogram(series: &SignSeries) -> Result<Psd> {
    periodogram_owned(series.signs.iter().map(|&s| f64::from(s)).collect())
}

/// Periodogram core taking ownership of the input so the real-input FFT
/// can consume it in place. Buffers are released as soon as the spectrum
/// is assembled, keeping the peak footprint near two output-sized
/// allocations even for series of 10^8 events.
fn periodogram_owned(mut input: Vec<f64>) -> Result<Psd> {
    let n = input.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "periodogram needs at least 2 samples, got {n}"
        )));
    }
    let mut planner = RealFftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut output = fft.make_output_vec();
    let mut scratch = fft.make_scratch_vec();
    fft.process_with_scratch(&mut input, &mut output, &mut scratch)
        .map_err(|e| Error::EstimationFailed(format!("FFT failed: {e}")))?;
    drop(scratch);
    drop(input);

    let half = n / 2;
    let mut freqs = Vec::with_capacity(half);
    let mut spectrum = Vec::with_capacity(half);
    for k in 1..=half {
        let weight = if n % 2 == 0 && k == half { 1.0 } else { 2.0 };
        freqs.push(k as f64 / n as f64);
        spectrum.push(weight * output[k].norm_sqr() / n as f64);
    }
    Ok(Psd { freqs, values: spectrum, n_events: n as u64 })
}

/// Centered uniform moving average over 2 * half_width + 1 bins, clamped
/// at the spectrum edges.
pub fn smooth_psd(psd: &Psd, half_width: usize) -> Psd {
    let n = psd.values.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in &psd.values {
        acc += v;
        prefix.push(acc);
    }
    let values = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half_width);
            let hi = (i + half_width).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64
        })
        .collect();
    Psd { freqs: psd.freqs.clone(), values, n_events: psd.n_events }
}

/// Spectral prefactor: converts the fitted spectral window back to the ACF
/// prefactor c0 of C(tau) ~ c0 tau^(-gamma) through the closed-form
/// Fourier pair of a power law, normalized by the integral of the smoothed
/// PSD over the fit window.
fn psd_prefactor(smoothed: &Psd, gamma: f64, k_window: (u64, u64)) -> f64 {
    let (k_lo, k_hi) = k_window;
    let xs: Vec<f64> = (k_lo..=k_hi)
        .map(|k| smoothed.freqs[(k - 1) as usize])
        .collect();
    let ys: Vec<f64> = (k_lo..=k_hi)
        .map(|k| smoothed.values[(k - 1) as usize])
        .collect();
    let integral = trapezoid(&xs, &ys);
    let (w_lo, w_hi) = (xs[0], *xs.last().unwrap());
    let two_pi = 2.0 * std::f64::consts::PI;
    let fourier = 2.0
        / (two_pi.powf(gamma - 1.0)
            * gamma_fn(1.0 - gamma)
            * (std::f64::consts::PI * gamma / 2.0).sin());
    fourier * gamma / (w_hi.powf(gamma) - w_lo.powf(gamma)) * integral
}

/// PSD-method gamma estimate starting from a precomputed periodogram.
///
/// Smooths over 11 bins, fits S ~ omega^(-H) between 15 grid bins and the
/// half bandwidth (the first bin in [100, 1000] dropping below the median
/// of the smoothed PSD over [15, N/1000]), and reports gamma = 1 - H.
pub fn gamma_from_psd(psd: &Psd) -> Result<FitReport> {
    let n = psd.n_events;
    let k_median_hi = n / 1000;
    if psd.values.len() < K_SEARCH.1 as usize || k_median_hi < K_LOWER {
        return Err(Error::InsufficientData(format!(
            "PSD pipeline needs at least {} events, got {n}",
            1000 * K_LOWER
        )));
    }
    let smoothed = smooth_psd(psd, SMOOTH_HALF_WIDTH);

    let mut band: Vec<f64> = (K_LOWER..=k_median_hi)
        .map(|k| smoothed.values[(k - 1) as usize])
        .collect();
    band.sort_unstable_by(f64::total_cmp);
    let median = if band.len() % 2 == 1 {
        band[band.len() / 2]
    } else {
        (band[band.len() / 2 - 1] + band[band.len() / 2]) / 2.0
    };

    let k_half = (K_SEARCH.0..=K_SEARCH.1)
        .find(|&k| smoothed.values[(k - 1) as usize] < median)
        .unwrap_or(K_SEARCH.1);

    let points: Vec<(f64, f64)> = (K_LOWER..=k_half)
        .map(|k| {
            (smoothed.freqs[(k - 1) as usize], smoothed.values[(k - 1) as usize])
        })
        .collect();
    let window = (points[0].0, points.last().unwrap().0);
    let fit = rls_powerlaw_fit(&points, window)?;
    let h = fit.exponent;
    if h >= 1.0 {
        return Err(Error::EstimationFailed(format!(
            "PSD exponent H = {h:.4} >= 1 has no stationary long-memory \
             counterpart"
        )));
    }
    let gamma = 1.0 - h;
    let c0 = psd_prefactor(&smoothed, gamma, (K_LOWER, k_half));
    Ok(FitReport {
        method: Method::Psd,
        gamma,
        c0: Some(c0),
        window,
        diagnostics: Diagnostics {
            tentative: None,
            scale: fit.scale,
            residual: fit.residual,
            iterations: fit.iterations,
            dropped_points: fit.dropped,
            n_points: fit.n_points,
        },
    })
}

/// Full PSD-method pipeline from a sign series.
pub fn psd_gamma(series: &SignSeries) -> Result<FitReport> {
    let psd = periodogram(series)?;
    gamma_from_psd(&psd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sign_series(n: usize, seed: u64) -> SignSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SignSeries {
            signs: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
            day_of_tick: vec![0; n],
        }
    }

    fn population_variance(values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
    }

    #[test]
    fn cosine_concentrates_in_one_bin() {
        let n = 1024usize;
        let k0 = 32usize;
        let values: Vec<f64> = (0..n)
            .map(|t| (2.0 * std::f64::consts::PI * k0 as f64 * t as f64 / n as f64).cos())
            .collect();
        let psd = periodogram_real(&values).unwrap();
        let argmax = psd
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        // Bin k occupies index k - 1.
        assert_eq!(argmax, k0 - 1);
        assert!((psd.freqs[argmax] - k0 as f64 / n as f64).abs() < 1e-15);
        // All power sits in that bin: S = 2 (N/2)^2 / N = N/2.
        assert!((psd.values[argmax] - n as f64 / 2.0).abs() < 1e-6);
    }

    #[test]
    fn parseval_holds_even_and_odd() {
        for (n, seed) in [(10_000usize, 1u64), (9_999, 2)] {
            let series = sign_series(n, seed);
            let psd = periodogram(&series).unwrap();
            let values: Vec<f64> = series.signs.iter().map(|&s| f64::from(s)).collect();
            let variance = population_variance(&values);
            let riemann: f64 = psd.values.iter().sum::<f64>() * psd.delta_omega();
            let rel = (riemann - variance).abs() / variance;
            assert!(rel < 1e-9, "N = {n}: relative Parseval error {rel}");
        }
    }

    #[test]
    fn white_noise_spectrum_is_flat_at_two() {
        // One-sided weighting puts the full unit variance into half the
        // bins, so the mean spectral level is 2.
        let psd = periodogram(&sign_series(1_000_000, 3)).unwrap();
        let mean = psd.values.iter().sum::<f64>() / psd.values.len() as f64;
        assert!((mean - 2.0).abs() < 0.01, "mean S {mean}");
    }

    #[test]
    fn periodogram_rejects_tiny_input() {
        assert!(periodogram_real(&[1.0]).is_err());
    }

    #[test]
    fn smoothing_preserves_constants_and_averages_windows() {
        let psd = Psd {
            freqs: (1..=100).map(|k| k as f64 / 1000.0).collect(),
            values: vec![1.5; 100],
            n_events: 1000,
        };
        let smoothed = smooth_psd(&psd, SMOOTH_HALF_WIDTH);
        assert_eq!(smoothed.values, psd.values);

        let ramp = Psd {
            freqs: psd.freqs.clone(),
            values: (0..100).map(|i| i as f64).collect(),
            n_events: 1000,
        };
        let smoothed = smooth_psd(&ramp, SMOOTH_HALF_WIDTH);
        // Interior bin: plain 11-point average; edge bin 0: mean of 0..=5.
        assert!((smoothed.values[50] - 50.0).abs() < 1e-12);
        assert!((smoothed.values[0] - 2.5).abs() < 1e-12);
    }

    fn synthetic_psd(n_events: u64, f: impl Fn(f64) -> f64) -> Psd {
        let half = (n_events / 2) as usize;
        let freqs: Vec<f64> = (1..=half).map(|k| k as f64 / n_events as f64).collect();
        let values = freqs.iter().map(|&w| f(w)).collect();
        Psd { freqs, values, n_events }
    }

    #[test]
    fn exact_powerlaw_spectrum_recovers_h() {
        let psd = synthetic_psd(100_000, |w| w.powf(-0.5));
        let report = gamma_from_psd(&psd).unwrap();
        assert!((report.gamma - 0.5).abs() < 0.01, "gamma {}", report.gamma);
        // S = omega^(-1/2): the Fourier normalization collapses to exactly 4
        // for the raw curve. The 11-bin smoothing inflates the decaying
        // spectrum near the 15-bin lower threshold (about +1.8% at bin 15,
        // falling off as 1/k^2), which tilts H by a few thousandths and
        // shifts the recovered prefactor by about one percent, so the
        // pipeline value is asserted to 2%.
        let c0 = report.c0.unwrap();
        assert!((c0 - 4.0).abs() < 0.08, "c0 {c0}");
    }

    #[test]
    fn steep_spectrum_is_rejected() {
        let psd = synthetic_psd(100_000, |w| w.powf(-1.3));
        match gamma_from_psd(&psd) {
            Err(Error::EstimationFailed(_)) => {}
            other => panic!("expected estimation failure, got {other:?}"),
        }
    }

    #[test]
    fn white_noise_gamma_is_near_one() {
        // On a flat spectrum the half-bandwidth search exits almost
        // immediately past bin 100 (the smoothed spectrum dips below its own
        // median within a few bins), so the fit sees only ~90 bins whose
        // 11-bin smoothing leaves them strongly correlated: the standard
        // error of H is about 0.2. The band below documents H ~ 0 at that
        // precision; the ACF and DFA white-noise nulls carry the tight
        // checks.
        let report = psd_gamma(&sign_series(200_000, 9)).unwrap();
        assert!((report.gamma - 1.0).abs() < 0.5, "gamma {}", report.gamma);
    }

    #[test]
    fn short_series_is_rejected_by_pipeline() {
        assert!(matches!(
            psd_gamma(&sign_series(10_000, 4)),
            Err(Error::InsufficientData(_))
        ));
    }
}
