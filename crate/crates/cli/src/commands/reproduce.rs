//! `reproduce`: standard experiment recipes emitted as CSV data files.
//!
//! Four targets cover the toolkit's headline experiments:
//!
//! * `acf-bias` / `psd-bias`: estimator consistency at the largest scale
//!   length, finite-sample bias on a standard ensemble, the per-replicate
//!   regression coefficients behind the bias correction, and the corrected
//!   estimates on a held-out ensemble.
//! * `trader-count`: trader-count inference on homogeneous runs plus the
//!   lower-bound behavior under heterogeneous trading intensities.
//! * `dfa-check`: slope comparison showing the detrended-fluctuation
//!   estimator's stronger finite-sample bias against the ACF estimator.

use oflow_core::calibrate::{
    calibrate_bias, nst_from_prefactor, nst_from_prefactor_calibrated, run_gamma_ensemble,
    standard_ensemble, EnsembleOutcome,
};
use oflow_core::lmf_sim::simulate_signs;
use oflow_core::numeric::{ols, pearson};
use oflow_core::rng::{derive_seed, stream_rng};
use oflow_core::{Error, Method, Result, SimParams};
use rand::Rng;
use rayon::prelude::*;

use crate::commands::{
    estimate_signs, load_calibration, TAG_CONSISTENCY, TAG_HELD_OUT, TAG_HETEROGENEOUS,
    TAG_HOMOGENEOUS,
};
use crate::config::{Context, GammaMethod, ResolvedReproduce, Target};
use crate::manifest::{csv_bytes, ArtifactWriter};

/// Exponents of the consistency and DFA panels.
const PANEL_ALPHAS: [f64; 3] = [1.2, 1.5, 1.8];

/// Trader-count panel: simulation count and trader-count range.
const N_HOMOGENEOUS: usize = 30;
const N_HETEROGENEOUS: usize = 20;
const COUNT_RANGE: (f64, f64) = (20.0, 500.0);
const COUNT_EVENTS: u64 = 1_000_000;

pub fn run(ctx: &Context, p: &ResolvedReproduce) -> Result<()> {
    match p.target {
        Target::AcfBias => bias_target(ctx, p, GammaMethod::Acf),
        Target::PsdBias => bias_target(ctx, p, GammaMethod::Psd),
        Target::TraderCount => trader_count(ctx, p),
        Target::DfaCheck => dfa_check(ctx, p),
    }
}

/// (alpha, gamma) at n_st = 100 and the scale's largest length, one
/// simulation per panel exponent.
fn consistency_rows(method: Method, n_events: u64, seed: u64) -> Result<Vec<(f64, f64)>> {
    PANEL_ALPHAS
        .par_iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let params = SimParams::uniform(
                100,
                n_events,
                alpha,
                derive_seed(seed, TAG_CONSISTENCY, i as u64),
            );
            let report = estimate_signs(method, simulate_signs(&params)?)?;
            Ok((alpha, report.gamma))
        })
        .collect()
}

/// Per-replicate ordinary least squares of gamma on (alpha - 1) over the
/// surviving outcomes, as (replicate, slope, intercept) rows.
fn per_replicate_ols(outcomes: &[EnsembleOutcome]) -> Vec<(u32, f64, f64)> {
    let max_rep = outcomes.iter().map(|o| o.replicate).max().unwrap_or(0);
    let mut rows = Vec::new();
    for r in 0..=max_rep {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for outcome in outcomes.iter().filter(|o| o.replicate == r) {
            if let Some(report) = &outcome.report {
                xs.push(outcome.point.alpha - 1.0);
                ys.push(report.gamma);
            }
        }
        if xs.len() < 2 {
            continue;
        }
        if let Ok((slope, intercept)) = ols(&xs, &ys) {
            rows.push((r, slope, intercept));
        }
    }
    rows
}

fn gamma_rows_csv(outcomes: &[EnsembleOutcome], value_header: &str) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["replicate", "alpha", value_header])?;
        for outcome in outcomes {
            if let Some(report) = &outcome.report {
                w.write_record([
                    outcome.replicate.to_string().as_str(),
                    &outcome.point.alpha.to_string(),
                    &report.gamma.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

fn bias_target(ctx: &Context, p: &ResolvedReproduce, method: GammaMethod) -> Result<()> {
    let core_m = method.to_core();
    let target = p.target.name();
    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;

    // Panel 1: consistency at the largest length the scale permits.
    let consist = consistency_rows(core_m, ctx.scale.max_events(), ctx.seed)?;
    let consist_csv = csv_bytes(|w| {
        w.write_record(["alpha", "gamma"])?;
        for &(alpha, gamma) in &consist {
            w.write_record([alpha.to_string().as_str(), &gamma.to_string()])?;
        }
        Ok(())
    })?;
    writer.write(&format!("{target}-consistency.csv"), &consist_csv)?;

    // Panel 2: finite-sample bias on the standard ensemble, with the
    // per-replicate regression coefficients.
    let ensemble = standard_ensemble(p.points, ctx.seed);
    let outcomes = run_gamma_ensemble(&ensemble, core_m, p.replicates, ctx.seed)?;
    writer.write(&format!("{target}-bias.csv"), &gamma_rows_csv(&outcomes, "gamma")?)?;

    let betas = per_replicate_ols(&outcomes);
    if betas.is_empty() {
        return Err(Error::CalibrationFailed(
            "no replicate produced enough estimates for the bias regression".into(),
        ));
    }
    let betas_csv = csv_bytes(|w| {
        w.write_record(["replicate", "beta1", "beta2"])?;
        for &(r, b1, b2) in &betas {
            w.write_record([
                r.to_string().as_str(),
                &b1.to_string(),
                &b2.to_string(),
            ])?;
        }
        Ok(())
    })?;
    writer.write(&format!("{target}-betas.csv"), &betas_csv)?;
    let beta1 = betas.iter().map(|b| b.1).sum::<f64>() / betas.len() as f64;
    let beta2 = betas.iter().map(|b| b.2).sum::<f64>() / betas.len() as f64;

    // Panel 3: unbiased estimates on a held-out ensemble.
    let held = standard_ensemble(p.points, derive_seed(ctx.seed, TAG_HELD_OUT, 0));
    let held_outcomes =
        run_gamma_ensemble(&held, core_m, p.replicates, derive_seed(ctx.seed, TAG_HELD_OUT, 1))?;
    let unbiased_csv = csv_bytes(|w| {
        w.write_record(["replicate", "alpha", "gamma_unbiased"])?;
        for outcome in &held_outcomes {
            if let Some(report) = &outcome.report {
                w.write_record([
                    outcome.replicate.to_string().as_str(),
                    &outcome.point.alpha.to_string(),
                    &((report.gamma - beta2) / beta1).to_string(),
                ])?;
            }
        }
        Ok(())
    })?;
    writer.write(&format!("{target}-unbiased.csv"), &unbiased_csv)?;
    writer.finish(&format!("reproduce-{target}"), ctx, p)?;

    let dropped = outcomes.iter().filter(|o| o.report.is_none()).count();
    let held_err: Vec<f64> = held_outcomes
        .iter()
        .filter_map(|o| {
            o.report.as_ref().map(|r| o.point.alpha - 1.0 - (r.gamma - beta2) / beta1)
        })
        .collect();
    let mean_err = held_err.iter().sum::<f64>() / held_err.len().max(1) as f64;
    println!(
        "reproduce {target}: beta1 {beta1:.3}, beta2 {beta2:.3} \
         ({} points x {} replicates, {dropped} dropped); \
         held-out mean(alpha - 1 - gamma_unbiased) {mean_err:+.4}",
        p.points, p.replicates
    );
    Ok(())
}

/// Log-spaced trader counts over [lo, hi], duplicates allowed.
fn log_spaced_counts(n: usize, (lo, hi): (f64, f64)) -> Vec<u32> {
    (0..n)
        .map(|i| {
            let frac = i as f64 / (n - 1).max(1) as f64;
            (lo * (hi / lo).powf(frac)).round() as u32
        })
        .collect()
}

/// One trader-count inference row.
struct CountRow {
    n_st_true: u32,
    gamma: f64,
    c0: f64,
    est_raw: f64,
    est_calibrated: f64,
}

fn count_rows_csv(rows: &[CountRow]) -> Result<Vec<u8>> {
    csv_bytes(|w| {
        w.write_record(["n_st_true", "gamma", "c0", "n_st_est_raw", "n_st_est_calibrated"])?;
        for row in rows {
            w.write_record([
                row.n_st_true.to_string().as_str(),
                &row.gamma.to_string(),
                &row.c0.to_string(),
                &row.est_raw.to_string(),
                &row.est_calibrated.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Simulates one parameter point and infers the trader count from the
/// fitted ACF exponent and prefactor. `None` when any stage fails.
fn infer_count(params: &SimParams, beta3: f64, beta4: f64) -> Option<CountRow> {
    let report = simulate_signs(params).and_then(|s| estimate_signs(Method::Acf, s)).ok()?;
    let c0 = report.c0?;
    let est_raw = nst_from_prefactor(c0, report.gamma).ok()?;
    let est_calibrated =
        nst_from_prefactor_calibrated(c0, report.gamma, beta3, beta4).ok()?;
    Some(CountRow { n_st_true: params.n_traders, gamma: report.gamma, c0, est_raw, est_calibrated })
}

fn trader_count(ctx: &Context, p: &ResolvedReproduce) -> Result<()> {
    let table = match &p.calibration {
        Some(path) => load_calibration(path, Method::Acf)?,
        None => {
            let ensemble = standard_ensemble(p.points, ctx.seed);
            calibrate_bias(&ensemble, Method::Acf, p.replicates, ctx.seed)?
        }
    };

    // Homogeneous panel: uniform intensities over a trader-count sweep.
    let homogeneous: Vec<CountRow> = log_spaced_counts(N_HOMOGENEOUS, COUNT_RANGE)
        .par_iter()
        .enumerate()
        .filter_map(|(i, &n_st)| {
            let params = SimParams::uniform(
                n_st,
                COUNT_EVENTS,
                1.5,
                derive_seed(ctx.seed, TAG_HOMOGENEOUS, i as u64),
            );
            infer_count(&params, table.beta3, table.beta4)
        })
        .collect();
    if homogeneous.len() < 2 {
        return Err(Error::EstimationFailed(
            "too few homogeneous trader-count estimates survived".into(),
        ));
    }

    // Heterogeneous panel: heavy-tailed intensity vectors, same sweep.
    let heterogeneous: Vec<CountRow> = log_spaced_counts(N_HETEROGENEOUS, COUNT_RANGE)
        .par_iter()
        .enumerate()
        .filter_map(|(i, &n_st)| {
            let seed = derive_seed(ctx.seed, TAG_HETEROGENEOUS, i as u64);
            let mut rng = stream_rng(seed, u64::MAX);
            // Pareto-like weights u^(-1/2) give a few dominant traders.
            let raw: Vec<f64> =
                (0..n_st).map(|_| rng.random::<f64>().max(1e-12).powf(-0.5)).collect();
            let total: f64 = raw.iter().sum();
            let params = SimParams {
                n_traders: n_st,
                n_events: COUNT_EVENTS,
                alpha: 1.5,
                seed,
                intensities: Some(raw.iter().map(|w| w / total).collect()),
            };
            infer_count(&params, table.beta3, table.beta4)
        })
        .collect();

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write("trader-count-homogeneous.csv", &count_rows_csv(&homogeneous)?)?;
    writer.write("trader-count-heterogeneous.csv", &count_rows_csv(&heterogeneous)?)?;
    writer.finish("reproduce-trader-count", ctx, p)?;

    let log_true: Vec<f64> =
        homogeneous.iter().map(|r| (r.n_st_true as f64).log10()).collect();
    let log_est: Vec<f64> = homogeneous.iter().map(|r| r.est_calibrated.log10()).collect();
    let corr = pearson(&log_true, &log_est)?;
    let bounded = heterogeneous
        .iter()
        .filter(|r| r.est_calibrated <= r.n_st_true as f64)
        .count();
    println!(
        "reproduce trader-count: log-log correlation {corr:.3} over {} homogeneous runs; \
         estimate <= true in {bounded}/{} heterogeneous runs",
        homogeneous.len(),
        heterogeneous.len(),
    );
    Ok(())
}

fn dfa_check(ctx: &Context, p: &ResolvedReproduce) -> Result<()> {
    let n_events = ctx.scale.max_events();
    let rows: Vec<(f64, f64, f64)> = PANEL_ALPHAS
        .par_iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let params = SimParams::uniform(
                100,
                n_events,
                alpha,
                derive_seed(ctx.seed, TAG_CONSISTENCY, i as u64),
            );
            let signs = simulate_signs(&params)?;
            let acf = estimate_signs(Method::Acf, signs.clone())?;
            let dfa = estimate_signs(Method::Dfa, signs)?;
            Ok((alpha, acf.gamma, dfa.gamma))
        })
        .collect::<Result<_>>()?;

    let xs: Vec<f64> = rows.iter().map(|r| r.0 - 1.0).collect();
    let (slope_acf, _) = ols(&xs, &rows.iter().map(|r| r.1).collect::<Vec<_>>())?;
    let (slope_dfa, _) = ols(&xs, &rows.iter().map(|r| r.2).collect::<Vec<_>>())?;

    let rows_csv = csv_bytes(|w| {
        w.write_record(["alpha", "gamma_acf", "gamma_dfa"])?;
        for &(alpha, ga, gd) in &rows {
            w.write_record([
                alpha.to_string().as_str(),
                &ga.to_string(),
                &gd.to_string(),
            ])?;
        }
        Ok(())
    })?;
    let slopes_csv = csv_bytes(|w| {
        w.write_record(["method", "slope"])?;
        w.write_record(["acf", slope_acf.to_string().as_str()])?;
        w.write_record(["dfa", slope_dfa.to_string().as_str()])?;
        Ok(())
    })?;

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write("dfa-check.csv", &rows_csv)?;
    writer.write("dfa-check-slopes.csv", &slopes_csv)?;
    writer.finish("reproduce-dfa-check", ctx, p)?;
    println!(
        "reproduce dfa-check: slope on (alpha - 1) is {slope_dfa:.3} for dfa \
         vs {slope_acf:.3} for acf over {} events",
        n_events
    );
    Ok(())
}
