//! Runs-test classification of traders into splitting traders (STs) and
//! random traders (RTs).
//!
//! A trader emitting n_mo order signs has n_run same-sign runs. Under the
//! null of i.i.d. fair signs the boundary count B = n_run - 1 is
//! Binomial(n_mo - 1, 1/2). Order splitting lengthens runs, so the test is
//! lower-tailed: too few runs rejects the null and labels the trader ST.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::order_tape::TraderTape;

/// Default significance level for the runs test.
pub const DEFAULT_THETA: f64 = 0.01;

/// Default activity threshold: an ST counts as active only with at least
/// this many orders in the sample.
pub const DEFAULT_MIN_ORDERS: u64 = 1000;

/// Outcome of classifying a set of trader tapes.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    /// Traders rejected by the runs test (splitting traders).
    pub st_ids: BTreeSet<String>,
    /// Everyone else, including untestable traders with fewer than 2 orders.
    pub rt_ids: BTreeSet<String>,
    /// Lower-tail p-value per trader; untestable traders carry 1.0.
    pub p_values: BTreeMap<String, f64>,
    /// Significance level used.
    pub theta: f64,
}

impl ClassificationResult {
    pub fn is_st(&self, trader_id: &str) -> bool {
        self.st_ids.contains(trader_id)
    }
}

/// Summary statistics of the ST subpopulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StStatistics {
    /// |ST| / number of traders.
    pub st_fraction: f64,
    /// Fraction of all market orders submitted by STs.
    pub st_mo_share: f64,
}

/// Exact lower-tail p-value of the runs test.
///
/// With m = n_mo - 1 boundaries and b = n_run - 1 sign changes,
/// p = P(B <= b) for B ~ Binomial(m, 1/2), summed term by term with a
/// log-space binomial recurrence so it stays exact and monotone in n_run
/// for n_mo up to 1e7.
pub fn runs_test_pvalue(n_mo: u64, n_run: u64) -> Result<f64> {
    if n_mo < 2 {
        return Err(Error::InvalidParameter(format!(
            "runs test needs n_mo >= 2, got {n_mo}"
        )));
    }
    if n_run < 1 || n_run > n_mo {
        return Err(Error::InvalidParameter(format!(
            "n_run must lie in [1, {n_mo}], got {n_run}"
        )));
    }
    let m = n_mo - 1;
    let b = n_run - 1;
    if b >= m {
        // The sum runs over the whole support, which is exactly 1.
        return Ok(1.0);
    }
    // ln P(B = 0) = -m ln 2; successive terms scale by (m - i) / (i + 1).
    let mut ln_term = -(m as f64) * std::f64::consts::LN_2;
    let mut sum = ln_term.exp();
    for i in 0..b {
        ln_term += ((m - i) as f64).ln() - ((i + 1) as f64).ln();
        sum += ln_term.exp();
    }
    Ok(sum.min(1.0))
}

/// Classifies every tape: ST iff the runs-test p-value is below `theta`.
///
/// Traders with fewer than 2 orders are untestable and default to RT.
pub fn classify_traders(tapes: &[TraderTape], theta: f64) -> Result<ClassificationResult> {
    if tapes.is_empty() {
        return Err(Error::EmptySeries("no trader tapes to classify".into()));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    let mut result = ClassificationResult {
        st_ids: BTreeSet::new(),
        rt_ids: BTreeSet::new(),
        p_values: BTreeMap::new(),
        theta,
    };
    for tape in tapes {
        let n_mo = tape.n_orders();
        let p = if n_mo < 2 {
            1.0
        } else {
            runs_test_pvalue(n_mo, tape.run_lengths.len() as u64)?
        };
        result.p_values.insert(tape.trader_id.clone(), p);
        if p < theta {
            result.st_ids.insert(tape.trader_id.clone());
        } else {
            result.rt_ids.insert(tape.trader_id.clone());
        }
    }
    Ok(result)
}

/// ST population share and the STs' share of all market orders.
///
/// `n_events` is the total market order count the tapes were built from.
pub fn st_statistics(
    result: &ClassificationResult,
    tapes: &[TraderTape],
    n_events: u64,
) -> StStatistics {
    let st_orders: u64 = tapes
        .iter()
        .filter(|t| result.is_st(&t.trader_id))
        .map(|t| t.n_orders())
        .sum();
    StStatistics {
        st_fraction: result.st_ids.len() as f64 / tapes.len() as f64,
        st_mo_share: if n_events == 0 {
            0.0
        } else {
            st_orders as f64 / n_events as f64
        },
    }
}

/// Yearly average number of active STs: the sum of active days over STs
/// with at least `min_orders` orders, divided by the days per year.
pub fn count_active_sts(
    result: &ClassificationResult,
    tapes: &[TraderTape],
    d_year: u64,
    min_orders: u64,
) -> Result<f64> {
    if d_year == 0 {
        return Err(Error::InvalidParameter("d_year must be positive".into()));
    }
    let active: u64 = tapes
        .iter()
        .filter(|t| result.is_st(&t.trader_id) && t.n_orders() >= min_orders)
        .map(|t| t.active_days)
        .sum();
    Ok(active as f64 / d_year as f64)
}
