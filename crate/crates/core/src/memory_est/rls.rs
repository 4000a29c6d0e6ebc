//! Relative least-squares power-law fitting.
//!
//! The cost J = sum(((y - f)/f)^2) with f(x) = A x^(-gamma) weights every
//! decade of a power law equally, unlike plain least squares which is
//! dominated by the largest values. The fit is initialized by ordinary
//! least squares in log space and refined with a Nelder-Mead simplex.

use crate::error::{Error, Result};
use crate::numeric::ols;

/// Relative cost-spread tolerance declaring the simplex converged.
pub(crate) const SIMPLEX_FTOL: f64 = 1e-10;

/// Iteration cap; exceeding it without meeting the tolerance is an error.
pub(crate) const SIMPLEX_MAX_ITER: u64 = 10_000;

pub(crate) struct SimplexOutcome {
    pub point: Vec<f64>,
    pub cost: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// Derivative-free Nelder-Mead minimization with the standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 1/2, 1/2).
///
/// Stops when the relative cost spread of the simplex drops below `ftol`
/// or after `max_iter` iterations.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(
    cost: F,
    start: &[f64],
    steps: &[f64],
    ftol: f64,
    max_iter: u64,
) -> SimplexOutcome {
    let dim = start.len();
    debug_assert_eq!(steps.len(), dim);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), cost(start)));
    for d in 0..dim {
        let mut v = start.to_vec();
        v[d] += steps[d];
        let c = cost(&v);
        simplex.push((v, c));
    }

    let mut iterations = 0;
    let converged = loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = 2.0 * (worst - best) / (worst.abs() + best.abs() + 1e-12);
        if spread < ftol {
            break true;
        }
        if iterations >= max_iter {
            break false;
        }
        iterations += 1;

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let worst_point = simplex[dim].0.clone();
        let at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst_point)
                .map(|(&c, &w)| c + coef * (c - w))
                .collect()
        };

        let reflected = at(1.0);
        let f_reflected = cost(&reflected);
        if f_reflected < simplex[0].1 {
            let expanded = at(2.0);
            let f_expanded = cost(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
        } else {
            let contracted = if f_reflected < simplex[dim].1 {
                at(0.5)
            } else {
                at(-0.5)
            };
            let f_contracted = cost(&contracted);
            if f_contracted < simplex[dim].1.min(f_reflected) {
                simplex[dim] = (contracted, f_contracted);
            } else {
                // Shrink every vertex toward the best.
                let anchor = simplex[0].0.clone();
                for (v, c) in simplex.iter_mut().skip(1) {
                    for (x, &a) in v.iter_mut().zip(&anchor) {
                        *x = a + 0.5 * (*x - a);
                    }
                    *c = cost(v);
                }
            }
        }
    };

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, cost) = simplex.swap_remove(0);
    SimplexOutcome { point, cost, iterations, converged }
}

/// Power-law fit result from [`rls_powerlaw_fit`].
#[derive(Debug, Clone, Copy)]
pub struct PowerlawFit {
    /// Exponent gamma of f(x) = A x^(-gamma).
    pub exponent: f64,
    /// Scale A.
    pub scale: f64,
    /// Final relative least-squares cost.
    pub residual: f64,
    pub iterations: u64,
    /// Points used after window and positivity filtering.
    pub n_points: usize,
    /// In-window points dropped for nonpositive ordinates.
    pub dropped: usize,
}

/// Fits f(x) = A x^(-gamma) to the points inside `window` by relative
/// least squares.
///
/// Nonpositive ordinates are dropped (the relative residual is undefined
/// there) and counted; at least 5 positive points must remain.
pub fn rls_powerlaw_fit(points: &[(f64, f64)], window: (f64, f64)) -> Result<PowerlawFit> {
    if window.0 >= window.1 {
        return Err(Error::InvalidWindows(format!(
            "fit window [{}, {}] is empty",
            window.0, window.1
        )));
    }
    let mut ln_x = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0usize;
    for &(x, y) in points {
        if x < window.0 || x > window.1 {
            continue;
        }
        if y > 0.0 {
            ln_x.push(x.ln());
            ys.push(y);
        } else {
            dropped += 1;
        }
    }
    let n_points = ys.len();
    if n_points < 5 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs >= 5 positive points in window, got {n_points} \
             ({dropped} dropped as nonpositive)"
        )));
    }

    let ln_y: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept) = ols(&ln_x, &ln_y)?;
    // Parameterize as (ln A, gamma); f stays positive by construction.
    let start = [intercept, -slope];
    let cost = |p: &[f64]| -> f64 {
        let (ln_a, gamma) = (p[0], p[1]);
        ln_x.iter()
            .zip(&ys)
            .map(|(&lx, &y)| {
                let f = (ln_a - gamma * lx).exp();
                let r = (y - f) / f;
                r * r
            })
            .sum()
    };
    let outcome = nelder_mead(cost, &start, &[0.1, 0.1], SIMPLEX_FTOL, SIMPLEX_MAX_ITER);
    if !outcome.converged {
        return Err(Error::EstimationFailed(format!(
            "power-law fit did not converge in {SIMPLEX_MAX_ITER} iterations \
             (cost {:.3e}, {n_points} points)",
            outcome.cost
        )));
    }
    Ok(PowerlawFit {
        exponent: outcome.point[1],
        scale: outcome.point[0].exp(),
        residual: outcome.cost,
        iterations: outcome.iterations,
        n_points,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simplex_minimizes_quadratic() {
        let out = nelder_mead(
            |p| (p[0] - 1.0).powi(2) + (p[1] - 2.0).powi(2),
            &[5.0, -3.0],
            &[1.0, 1.0],
            1e-12,
            10_000,
        );
        assert!(out.converged);
        assert!((out.point[0] - 1.0).abs() < 1e-4);
        assert!((out.point[1] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn exact_powerlaw_is_recovered_with_zero_residual() {
        let points: Vec<(f64, f64)> =
            (1..=100).map(|i| (i as f64, 2.0 * (i as f64).powf(-0.5))).collect();
        let fit = rls_powerlaw_fit(&points, (1.0, 100.0)).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-6, "gamma {}", fit.exponent);
        assert!((fit.scale - 2.0).abs() < 1e-6, "A {}", fit.scale);
        assert!(fit.residual < 1e-12, "residual {}", fit.residual);
        assert_eq!(fit.n_points, 100);
        assert_eq!(fit.dropped, 0);
    }

    #[test]
    fn one_percent_noise_keeps_exponent_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(902);
        let points: Vec<(f64, f64)> = (1..=100)
            .map(|i| {
                let x = i as f64;
                let noise = 1.0 + 0.01 * (rng.random::<f64>() * 2.0 - 1.0);
                (x, 3.0 * x.powf(-0.7) * noise)
            })
            .collect();
        let fit = rls_powerlaw_fit(&points, (1.0, 100.0)).unwrap();
        assert!((fit.exponent - 0.7).abs() < 0.02, "gamma {}", fit.exponent);
    }

    #[test]
    fn rls_matches_log_ols_on_noiseless_data() {
        let points: Vec<(f64, f64)> =
            (2..=80).map(|i| (i as f64, 5.0 * (i as f64).powf(-1.2))).collect();
        let ln_x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let ln_y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let (slope, _) = ols(&ln_x, &ln_y).unwrap();
        let fit = rls_powerlaw_fit(&points, (1.0, 100.0)).unwrap();
        assert!((fit.exponent - (-slope)).abs() < 1e-3);
    }

    #[test]
    fn window_and_positivity_filters_apply() {
        let mut points: Vec<(f64, f64)> =
            (1..=20).map(|i| (i as f64, (i as f64).powf(-0.5))).collect();
        points.push((5.5, -1.0));
        points.push((200.0, 1.0));
        let fit = rls_powerlaw_fit(&points, (1.0, 100.0)).unwrap();
        assert_eq!(fit.n_points, 20);
        assert_eq!(fit.dropped, 1);

        assert!(matches!(
            rls_powerlaw_fit(&points[..4], (1.0, 100.0)),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            rls_powerlaw_fit(&points, (10.0, 10.0)),
            Err(Error::InvalidWindows(_))
        ));
    }
}
