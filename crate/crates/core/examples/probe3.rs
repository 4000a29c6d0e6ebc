//! Throwaway probe: per-point diagnostics of the gamma ensemble used for
//! bias calibration, ACF method, one replicate.

use oflow_core::calibrate::{run_gamma_ensemble, standard_ensemble};
use oflow_core::memory_est::Method;
use oflow_core::numeric::ols;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_points: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(50);
    let seed: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(11);
    let method = match args.get(3).map(String::as_str) {
        Some("psd") => Method::Psd,
        _ => Method::Acf,
    };
    let ensemble = standard_ensemble(n_points, seed);
    let outcomes = run_gamma_ensemble(&ensemble, method, 1, seed).unwrap();
    let mut rows: Vec<_> = outcomes.iter().collect();
    rows.sort_by(|a, b| a.point.alpha.total_cmp(&b.point.alpha));
    println!(
        "{:>6} {:>5} {:>9} {:>8} {:>8} {:>14} {:>10} {:>9} {:>9} {:>8} {:>6}",
        "alpha", "n_st", "n_ev", "gamma", "err",
        "window", "c0exp", "tau_t", "c1", "gam_t", "drop"
    );
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for o in rows {
        let p = o.point;
        let truth = p.alpha - 1.0;
        match &o.report {
            Some(rep) => {
                let t = rep.diagnostics.tentative.as_ref();
                println!(
                    "{:>6.3} {:>5} {:>9} {:>8.3} {:>+8.3} {:>6.0}..{:<7.0} {:>10.4} {:>9.1} {:>9.5} {:>8.3} {:>6}",
                    p.alpha, p.n_st, p.n_events, rep.gamma, rep.gamma - truth,
                    rep.window.0, rep.window.1,
                    t.map_or(f64::NAN, |t| t.c0_exp),
                    t.map_or(f64::NAN, |t| t.tau_temp),
                    t.map_or(f64::NAN, |t| t.c1),
                    t.map_or(f64::NAN, |t| t.gamma_temp),
                    rep.diagnostics.dropped_points,
                );
                xs.push(truth);
                ys.push(rep.gamma);
            }
            None => println!(
                "{:>6.3} {:>5} {:>9} {:>8} (estimation failed)",
                p.alpha, p.n_st, p.n_events, "-"
            ),
        }
    }
    let (slope, intercept) = ols(&xs, &ys).unwrap();
    println!("\nreplicate OLS: beta1 {slope:.3} beta2 {intercept:.3} ({} of {} points)", xs.len(), n_points);
}
