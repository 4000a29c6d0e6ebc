//! `scatter`: unbiased memory exponent against the true exponent on a
//! fresh evaluation ensemble, as CSV plus a static SVG rendering with
//! binned means and box glyphs.

use oflow_core::calibrate::{
    calibrate_bias, run_gamma_ensemble, standard_ensemble, unbias,
};
use oflow_core::rng::derive_seed;
use oflow_core::{Error, Result};

use crate::commands::{load_calibration, TAG_SCATTER_EVAL};
use crate::config::{Context, ResolvedScatter};
use crate::manifest::{csv_bytes, ArtifactWriter};
use crate::svg::{BoxSummary, Figure};

const N_BINS: usize = 8;

pub fn run(ctx: &Context, p: &ResolvedScatter) -> Result<()> {
    let method = p.method.to_core();
    let table = match &p.calibration {
        Some(path) => load_calibration(path, method)?,
        None => {
            let ensemble = standard_ensemble(p.points, ctx.seed);
            calibrate_bias(&ensemble, method, p.replicates, ctx.seed)?
        }
    };

    // Evaluation ensemble in a seed space disjoint from the calibration.
    let eval_seed = derive_seed(ctx.seed, TAG_SCATTER_EVAL, 0);
    let ensemble = standard_ensemble(p.points, eval_seed);
    let outcomes = run_gamma_ensemble(&ensemble, method, 1, eval_seed)?;

    let mut points: Vec<(f64, f64)> = Vec::new();
    for outcome in &outcomes {
        if let Some(report) = &outcome.report {
            points.push((outcome.point.alpha, unbias(report.gamma, &table)?));
        }
    }
    if points.len() < 2 {
        return Err(Error::EstimationFailed(format!(
            "only {} of {} scatter points could be estimated",
            points.len(),
            outcomes.len()
        )));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    // Equal-width bins over the observed alpha range.
    let lo = points.first().unwrap().0;
    let hi = points.last().unwrap().0;
    let width = ((hi - lo) / N_BINS as f64).max(f64::MIN_POSITIVE);
    let bin_of = |alpha: f64| (((alpha - lo) / width) as usize).min(N_BINS - 1);
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); N_BINS];
    for &(alpha, gamma) in &points {
        bins[bin_of(alpha)].push(gamma);
    }
    let bin_means: Vec<f64> = bins
        .iter()
        .map(|b| b.iter().sum::<f64>() / b.len().max(1) as f64)
        .collect();

    let csv = csv_bytes(|w| {
        w.write_record(["alpha", "gamma_unbiased", "bin_mean"])?;
        for &(alpha, gamma) in &points {
            w.write_record([
                alpha.to_string().as_str(),
                &gamma.to_string(),
                &bin_means[bin_of(alpha)].to_string(),
            ])?;
        }
        Ok(())
    })?;

    let svg = render_figure(&points, &bins, &bin_means, lo, width);

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write("scatter.csv", &csv)?;
    writer.write("scatter.svg", svg.as_bytes())?;
    writer.finish("scatter", ctx, p)?;

    let mean_err = points.iter().map(|&(a, g)| a - 1.0 - g).sum::<f64>() / points.len() as f64;
    println!(
        "scatter: {} points, mean(alpha - 1 - gamma_unbiased) {:+.4} -> scatter.csv, scatter.svg",
        points.len(),
        mean_err
    );
    Ok(())
}

fn render_figure(
    points: &[(f64, f64)],
    bins: &[Vec<f64>],
    bin_means: &[f64],
    lo: f64,
    width: f64,
) -> String {
    // Plot against the true exponent alpha - 1 so the identity is the
    // reference line.
    let xs: Vec<(f64, f64)> = points.iter().map(|&(a, g)| (a - 1.0, g)).collect();
    let y_min = xs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).min(0.0);
    let y_max = xs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).max(1.0);
    let x_range = (lo - 1.0, lo - 1.0 + width * bins.len() as f64);

    let mut fig = Figure::new(
        "Unbiased memory exponent vs true exponent",
        "alpha - 1",
        "gamma (unbiased)",
        x_range,
        (y_min, y_max),
    );
    fig.line((x_range.0, x_range.0), (x_range.1, x_range.1), "#888888", 1.0);
    fig.circles(&xs, 3.0, "#1f77b4", 0.55);

    let mut mean_line: Vec<(f64, f64)> = Vec::new();
    for (i, bin) in bins.iter().enumerate() {
        if bin.is_empty() {
            continue;
        }
        let center = lo - 1.0 + (i as f64 + 0.5) * width;
        mean_line.push((center, bin_means[i]));
        if let Some(summary) = BoxSummary::from_values(bin) {
            fig.box_glyph(center, &summary, 0.3 * width, "#2ca02c");
        }
    }
    fig.polyline(&mean_line, "#d62728", 2.0);
    fig.render()
}
