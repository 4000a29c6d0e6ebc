use oflow_core::memory_est::{acf_gamma, dfa_gamma, log_smooth, psd_gamma, sample_acf};
use oflow_core::lmf_sim::{simulate_signs, SimParams};
use oflow_core::order_tape::SignSeries;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let alpha: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.8);
    let n: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10_000_000);
    let n_st: u32 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(7);

    let params = SimParams::uniform(n_st, n, alpha, seed);
    let signs = simulate_signs(&params).unwrap();
    let series = SignSeries { day_of_tick: vec![0; signs.len()], signs };

    let acf = sample_acf(&series, 10_000).unwrap();
    let smoothed = log_smooth(&acf, 1.3).unwrap();
    println!("alpha {alpha} n {n} n_st {n_st} seed {seed}");
    println!("true gamma {:.3}", alpha - 1.0);
    println!("raw acf (windowed mean over [0.9 tau, 1.1 tau]):");
    for &t in &[1u64, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000] {
        let lo = ((t as f64 * 0.9).floor() as u64).max(1);
        let hi = ((t as f64 * 1.1).ceil() as u64).min(10_000);
        let vals: Vec<f64> = (lo..=hi).map(|tau| acf.value_at(tau)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        println!("  {t:6} {mean:13.6e}  (window {lo}..{hi}, {} lags)", vals.len());
    }
    println!("tau, smoothed acf, local log-slope (vs prev tau):");
    let taus = [10u64, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000];
    let mut prev: Option<(f64, f64)> = None;
    for &t in &taus {
        let v = smoothed.value_at(t);
        let slope = prev
            .map(|(pt, pv)| ((v.max(1e-12)).ln() - pv.ln()) / ((t as f64).ln() - pt.ln()))
            .unwrap_or(f64::NAN);
        println!("  {t:6} {v:12.6e} {slope:8.3}");
        if v > 0.0 {
            prev = Some((t as f64, v));
        }
    }
    match acf_gamma(&series, 10_000) {
        Ok(r) => println!(
            "acf: gamma {:.4} c0 {:.4} window {:?}",
            r.gamma,
            r.c0.unwrap_or(f64::NAN),
            r.window
        ),
        Err(e) => println!("acf failed: {e}"),
    }
    match psd_gamma(&series) {
        Ok(r) => println!("psd: gamma {:.4} c0 {:.4}", r.gamma, r.c0.unwrap_or(f64::NAN)),
        Err(e) => println!("psd failed: {e}"),
    }
    match dfa_gamma(&series, None) {
        Ok(r) => println!("dfa: gamma {:.4}", r.gamma),
        Err(e) => println!("dfa failed: {e}"),
    }
}
