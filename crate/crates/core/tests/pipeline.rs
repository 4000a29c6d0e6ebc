//! Cross-module pipeline checks that exercise the simulator together with
//! both long-memory estimators on realistically sized series.

use oflow_core::lmf_sim::{simulate_signs, SimParams};
use oflow_core::memory_est::{acf_gamma, psd_gamma, sample_acf};
use oflow_core::order_tape::SignSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn white_noise_acf_stays_under_statistical_floor() {
    // For iid fair signs every lag of the sample ACF is a centered mean of
    // N - tau products, so |C(tau)| <= 5/sqrt(N) simultaneously over
    // tau <= 1e4 holds with large probability.
    let n = 1_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let series = SignSeries {
        signs: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
        day_of_tick: vec![0; n],
    };
    let acf = sample_acf(&series, 10_000).unwrap();
    let bound = 5.0 / (n as f64).sqrt();
    let worst = acf.values.iter().fold(0f64, |a, &v| a.max(v.abs()));
    assert!(worst <= bound, "max |C| = {worst}, bound {bound}");
}

#[test]
fn acf_and_psd_agree_on_one_realization() {
    // Wiener-Khinchin coherence: the two estimators see the same
    // correlations of a single simulated realization, so their memory
    // exponents must agree within their finite-size scatter.
    let params = SimParams::uniform(100, 10_000_000, 1.5, 4242);
    let signs = simulate_signs(&params).unwrap();
    let n = signs.len();
    let series = SignSeries { signs, day_of_tick: vec![0; n] };

    let acf_report = acf_gamma(&series, 10_000).unwrap();
    let psd_report = psd_gamma(&series).unwrap();

    let (ga, gs) = (acf_report.gamma, psd_report.gamma);
    assert!((ga - gs).abs() <= 0.15, "gamma_acf {ga} vs gamma_psd {gs}");
    // Both sit in the physical range around the alpha - 1 = 0.5 target.
    assert!((0.25..=0.75).contains(&ga), "gamma_acf {ga}");
    assert!((0.25..=0.75).contains(&gs), "gamma_psd {gs}");
}
