//! Power-law tail estimation for metaorder lengths and the geometric
//! decay-length estimator for random-trader runs.
//!
//! The tail fit follows Clauset's recipe for discrete data: for every
//! candidate cutoff xmin, estimate the exponent by maximum likelihood, then
//! keep the cutoff whose fitted tail is closest to the empirical tail in
//! Kolmogorov-Smirnov distance. The likelihood is the exact conditional one
//! of the integer family with survival function P(L >= l) = l^(-alpha) (the
//! law of floored Pareto variables): its tail normalization telescopes to
//! xmin^(-alpha), so the MLE needs no zeta functions and, unlike the common
//! half-integer-shift continuous approximation, stays unbiased at the small
//! cutoffs the KS criterion favors. The reported `alpha` is the CCDF
//! exponent, P_>(L) ~ L^(-alpha), one less than the pdf exponent.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum total sample size for a tail fit.
const MIN_SAMPLES: usize = 50;

/// Minimum number of points at or above a candidate cutoff.
const MIN_TAIL: usize = 10;

/// Result of a discrete power-law tail fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    /// CCDF tail exponent: P_>(L) ~ L^(-alpha).
    pub alpha: f64,
    /// Pdf-convention exponent, `alpha + 1`.
    pub alpha_pdf: f64,
    /// Selected cutoff; the fit uses samples >= xmin.
    pub xmin: u64,
    /// Kolmogorov-Smirnov distance of the winning fit.
    pub ks_distance: f64,
    /// Number of samples at or above xmin.
    pub n_tail: usize,
}

/// Empirical strictly-greater CCDF: P_>(x) = #{samples > x} / n.
///
/// Keys are 0 plus every distinct sample value, so the map starts at
/// P_>(0) = 1 and ends at P_>(max) = 0.
pub fn empirical_ccdf(samples: &[u64]) -> Result<BTreeMap<u64, f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySeries("empirical_ccdf of no samples".into()));
    }
    let n = samples.len() as f64;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in samples {
        *counts.entry(x).or_insert(0) += 1;
    }
    let mut ccdf = BTreeMap::new();
    ccdf.insert(0u64, 1.0);
    let mut greater = samples.len() as u64;
    for (&x, &c) in &counts {
        greater -= c;
        ccdf.insert(x, greater as f64 / n);
    }
    Ok(ccdf)
}

/// Clauset-style tail fit over positive integer samples.
///
/// Candidates run over every distinct observed value up to the 90th
/// percentile of the samples (so at least a tenth of the data supports
/// the tail) and keeping at least 10 tail points; KS ties go to the
/// smaller xmin so more data is kept.
pub fn clauset_fit(samples: &[u64]) -> Result<TailFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "tail fit needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&x| x == 0) {
        return Err(Error::InvalidParameter(
            "tail fit requires strictly positive samples".into(),
        ));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();

    // Aggregate to (value, count): both the likelihood score and the KS scan
    // only depend on the distinct values.
    let mut distinct: Vec<(u64, u64)> = Vec::new();
    for &x in &sorted {
        match distinct.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => distinct.push((x, 1)),
        }
    }

    // Nearest-rank 90th percentile: the largest candidate cutoff.
    let p90 = sorted[(9 * n).div_ceil(10) - 1];

    let mut best: Option<TailFit> = None;
    let mut consumed = 0u64;
    for j in 0..distinct.len() {
        let xmin = distinct[j].0;
        let n_tail = n as u64 - consumed;
        consumed += distinct[j].1;
        if xmin > p90 || (n_tail as usize) < MIN_TAIL {
            break;
        }
        let Some(alpha) = tail_mle(&distinct[j..], xmin) else {
            continue;
        };
        let ks = ks_distance(&distinct[j..], xmin, alpha, n_tail);
        if best.is_none_or(|b| ks < b.ks_distance) {
            best = Some(TailFit {
                alpha,
                alpha_pdf: alpha + 1.0,
                xmin,
                ks_distance: ks,
                n_tail: n_tail as usize,
            });
        }
    }
    best.ok_or_else(|| {
        Error::InsufficientData(format!(
            "no cutoff candidate kept at least {MIN_TAIL} tail samples"
        ))
    })
}

/// Exact conditional MLE of the tail exponent for the integer family
/// P(x >= v | x >= xmin) = (v/xmin)^(-alpha), from aggregated (value, count)
/// tail observations.
///
/// The log-likelihood is strictly concave in alpha, so its score has a
/// unique root, located by bisection. Returns None when the root falls
/// outside (0.001, 64), which covers the degenerate all-at-xmin tail.
fn tail_mle(tail: &[(u64, u64)], xmin: u64) -> Option<f64> {
    let ln_min = (xmin as f64).ln();
    // Per observation at v, d/d_alpha ln P(x = v | x >= xmin) =
    // ln xmin - ln v + L*r/(1 - r) with L = ln(1 + 1/v), r = exp(-alpha L);
    // expm1 keeps 1 - r accurate when L is tiny (large v).
    let score = |alpha: f64| -> f64 {
        let mut g = 0.0;
        for &(v, c) in tail {
            let lv = (v as f64).ln();
            let l1 = (1.0 / v as f64).ln_1p();
            let z = alpha * l1;
            let ratio = (-z).exp() / -(-z).exp_m1();
            g += c as f64 * (ln_min - lv + l1 * ratio);
        }
        g
    };
    let (mut lo, mut hi) = (1e-3, 64.0);
    if score(lo) <= 0.0 || score(hi) >= 0.0 {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Two-sided KS distance between the empirical conditional tail CCDF and
/// the fitted law P(x >= v | x >= xmin) = (v/xmin)^(-alpha), compared at
/// both sides of every distinct tail value.
fn ks_distance(tail: &[(u64, u64)], xmin: u64, alpha: f64, n_tail: u64) -> f64 {
    let m = xmin as f64;
    let total = n_tail as f64;
    let mut ks = 0f64;
    let mut seen = 0u64;
    for &(v, c) in tail {
        let emp_ge = (n_tail - seen) as f64 / total;
        let model_ge = (v as f64 / m).powf(-alpha);
        seen += c;
        let emp_gt = (n_tail - seen) as f64 / total;
        let model_gt = ((v as f64 + 1.0) / m).powf(-alpha);
        ks = ks.max((emp_ge - model_ge).abs()).max((emp_gt - model_gt).abs());
    }
    ks
}

/// Maximum-likelihood decay length of geometric-like runs: the sample mean,
/// matching the CCDF model P_>(L) ~ (L*)^(1-L).
pub fn geometric_fit(run_lengths: &[u64]) -> Result<f64> {
    if run_lengths.is_empty() {
        return Err(Error::EmptySeries("geometric_fit of no runs".into()));
    }
    Ok(run_lengths.iter().map(|&r| r as f64).sum::<f64>() / run_lengths.len() as f64)
}
