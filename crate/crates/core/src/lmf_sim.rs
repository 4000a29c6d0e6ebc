//! Monte-Carlo simulator of the splitting-trader market model.
//!
//! A population of `n_traders` latent traders each works through a queue of
//! metaorders. At every tick one trader is selected (uniformly by default,
//! or by a fixed intensity vector), emits the sign of its current metaorder,
//! and advances its queue: while child orders remain the counter decrements;
//! when the last child is emitted a fresh metaorder is drawn with power-law
//! length and a fair-coin sign. The emitted tick at a completion carries the
//! finished metaorder's sign; the fresh draw takes effect from the trader's
//! next selection.
//!
//! Metaorder lengths follow the integer power law with exact pmf
//! P(L = l) = l^(-alpha) - (l+1)^(-alpha), sampled by flooring a continuous
//! Pareto variate.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::order_tape::{runs_from_parts, SignSeries, TraderTape, DEFAULT_GAP_THRESHOLD_DAYS};
use crate::rng::stream_rng;

// ====================================================================
// Parameters
// ====================================================================

/// Simulation parameters.
#[derive(Debug, Clone)]
pub struct SimParams {
    /// Number of latent traders.
    pub n_traders: u32,
    /// Number of ticks to simulate.
    pub n_events: u64,
    /// Tail exponent of the metaorder-length law, must exceed 1 so the mean
    /// length is finite.
    pub alpha: f64,
    /// Master seed; all streams derive from it deterministically.
    pub seed: u64,
    /// Selection weights per trader; `None` means uniform. Must sum to 1.
    pub intensities: Option<Vec<f64>>,
}

impl SimParams {
    /// Uniform-intensity parameter set.
    pub fn uniform(n_traders: u32, n_events: u64, alpha: f64, seed: u64) -> Self {
        SimParams { n_traders, n_events, alpha, seed, intensities: None }
    }

    fn validate(&self) -> Result<()> {
        if self.n_traders == 0 {
            return Err(Error::InvalidParameter("n_traders must be >= 1".into()));
        }
        if self.n_events == 0 {
            return Err(Error::EmptySeries("n_events must be >= 1".into()));
        }
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and > 1 (infinite mean length otherwise), got {}",
                self.alpha
            )));
        }
        if let Some(weights) = &self.intensities {
            if weights.len() != self.n_traders as usize {
                return Err(Error::InvalidParameter(format!(
                    "{} intensities for {} traders",
                    weights.len(),
                    self.n_traders
                )));
            }
            if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
                return Err(Error::InvalidParameter(
                    "intensities must be finite and positive".into(),
                ));
            }
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "intensities sum to {total}, expected 1 within 1e-12"
                )));
            }
        }
        Ok(())
    }
}

/// Full simulation output.
#[derive(Debug)]
pub struct SimOutput {
    pub series: SignSeries,
    /// One reduced tape per trader, ordered by trader id.
    pub tapes: Vec<TraderTape>,
    /// Lengths of all completed metaorders, pooled in completion order.
    /// In-progress metaorders at the end of the run are not included.
    pub completed_lengths: Vec<u64>,
    /// Per-trader (sum, count) of the fair-coin signs drawn at metaorder
    /// starts, for balance diagnostics.
    pub reset_sign_balance: Vec<(i64, u64)>,
}

// ====================================================================
// Power-law integer sampler
// ====================================================================

/// Floors a continuous Pareto variate built from uniform `u` in [0, 1).
///
/// The resulting integer has exact pmf P(L = l) = l^(-alpha) - (l+1)^(-alpha).
fn pareto_integer_from_uniform(u: f64, alpha: f64) -> u64 {
    debug_assert!((0.0..1.0).contains(&u));
    let x = (1.0 - u).powf(-1.0 / alpha);
    // Saturating cast keeps stress runs at alpha <= 1 well defined.
    x as u64
}

/// Draws a power-law integer L >= 1 with pmf l^(-alpha) - (l+1)^(-alpha).
///
/// `alpha <= 1` is allowed here (useful for stress tests) but rejected by
/// [`SimParams`] because the mean length diverges.
pub fn sample_pareto_integer<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> Result<u64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and > 0, got {alpha}"
        )));
    }
    Ok(pareto_integer_from_uniform(rng.random::<f64>(), alpha))
}

// ====================================================================
// Trader selection
// ====================================================================

/// Walker alias table for O(1) weighted selection.
struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    fn new(weights: &[f64]) -> Self {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        let scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![0.0; n];
        let mut alias = vec![0u32; n];
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        // Index order is deterministic, so the table is reproducible.
        let mut remaining = scaled;
        for (i, &w) in remaining.iter().enumerate() {
            if w < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            prob[s] = remaining[s];
            alias[s] = l as u32;
            remaining[l] = (remaining[l] + remaining[s]) - 1.0;
            if remaining[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        AliasTable { prob, alias }
    }

    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let j = rng.random_range(0..self.prob.len());
        let u: f64 = rng.random();
        if u < self.prob[j] {
            j
        } else {
            self.alias[j] as usize
        }
    }
}

enum Selection {
    Uniform(usize),
    Weighted(AliasTable),
}

impl Selection {
    fn from_params(params: &SimParams) -> Selection {
        let n = params.n_traders as usize;
        match &params.intensities {
            None => Selection::Uniform(n),
            Some(weights) => {
                // An exactly-uniform vector takes the uniform path so that
                // simulate and simulate_heterogeneous agree draw for draw.
                let uniform = 1.0 / n as f64;
                if weights.iter().all(|w| (w - uniform).abs() <= 1e-12 * uniform) {
                    Selection::Uniform(n)
                } else {
                    Selection::Weighted(AliasTable::new(weights))
                }
            }
        }
    }

    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            Selection::Uniform(n) => rng.random_range(0..*n),
            Selection::Weighted(table) => table.draw(rng),
        }
    }
}

// ====================================================================
// Engine
// ====================================================================

/// Metaorder length law; the production law is the power-law sampler, tests
/// inject degenerate laws.
trait LengthLaw {
    fn draw(&self, rng: &mut ChaCha8Rng) -> u64;
}

struct ParetoLaw {
    alpha: f64,
}

impl LengthLaw for ParetoLaw {
    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        pareto_integer_from_uniform(rng.random::<f64>(), self.alpha)
    }
}

/// Side channel for per-tick and per-completion records. Implementations
/// must not consume randomness, so recording cannot perturb the path.
trait Recorder {
    fn tick(&mut self, trader: usize, tick_index: u64, sign: i8);
    fn completed(&mut self, trader: usize, length: u64);
    fn fresh_sign(&mut self, trader: usize, sign: i8);
}

struct NullRecorder;

impl Recorder for NullRecorder {
    #[inline]
    fn tick(&mut self, _: usize, _: u64, _: i8) {}
    #[inline]
    fn completed(&mut self, _: usize, _: u64) {}
    #[inline]
    fn fresh_sign(&mut self, _: usize, _: i8) {}
}

struct FullRecorder {
    ticks: Vec<Vec<u32>>,
    signs: Vec<Vec<i8>>,
    completed: Vec<u64>,
    reset_sum: Vec<i64>,
    reset_count: Vec<u64>,
}

impl FullRecorder {
    fn new(n_traders: usize) -> Self {
        FullRecorder {
            ticks: vec![Vec::new(); n_traders],
            signs: vec![Vec::new(); n_traders],
            completed: Vec::new(),
            reset_sum: vec![0; n_traders],
            reset_count: vec![0; n_traders],
        }
    }
}

impl Recorder for FullRecorder {
    #[inline]
    fn tick(&mut self, trader: usize, tick_index: u64, sign: i8) {
        self.ticks[trader].push(tick_index as u32);
        self.signs[trader].push(sign);
    }
    #[inline]
    fn completed(&mut self, _: usize, length: u64) {
        self.completed.push(length);
    }
    #[inline]
    fn fresh_sign(&mut self, trader: usize, sign: i8) {
        self.reset_sum[trader] += i64::from(sign);
        self.reset_count[trader] += 1;
    }
}

struct TraderState {
    sign: i8,
    remaining: u64,
    length: u64,
}

#[inline]
fn coin_sign(rng: &mut ChaCha8Rng) -> i8 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Core loop shared by every public entry point. The randomness layout is
/// part of the reproducibility contract: stream 0 selects traders, stream
/// 1 + i drives trader i's metaorder draws (length first, then sign).
fn run_engine<L: LengthLaw, Rec: Recorder>(
    params: &SimParams,
    law: &L,
    recorder: &mut Rec,
) -> Result<Vec<i8>> {
    params.validate()?;
    let n_traders = params.n_traders as usize;
    let n_events = params.n_events;
    if n_events > u32::MAX as u64 - 1 {
        return Err(Error::InvalidParameter(format!(
            "n_events {} exceeds the supported tick range",
            n_events
        )));
    }

    let selection = Selection::from_params(params);
    let mut select_rng = stream_rng(params.seed, 0);
    let mut trader_rngs: Vec<ChaCha8Rng> =
        (0..n_traders).map(|i| stream_rng(params.seed, 1 + i as u64)).collect();

    // Every trader begins with a fresh metaorder.
    let mut states: Vec<TraderState> = trader_rngs
        .iter_mut()
        .enumerate()
        .map(|(i, rng)| {
            let length = law.draw(rng);
            let sign = coin_sign(rng);
            recorder.fresh_sign(i, sign);
            TraderState { sign, remaining: length, length }
        })
        .collect();

    let mut series = Vec::with_capacity(n_events as usize);
    for tick in 1..=n_events {
        let chosen = selection.draw(&mut select_rng);
        let state = &mut states[chosen];
        let emitted = state.sign;
        series.push(emitted);
        recorder.tick(chosen, tick, emitted);

        if state.remaining > 1 {
            state.remaining -= 1;
        } else {
            // Last child emitted: metaorder complete, draw the next one.
            recorder.completed(chosen, state.length);
            let rng = &mut trader_rngs[chosen];
            let length = law.draw(rng);
            let sign = coin_sign(rng);
            recorder.fresh_sign(chosen, sign);
            states[chosen] = TraderState { sign, remaining: length, length };
        }
    }
    Ok(series)
}

fn trader_label(index: usize) -> String {
    format!("T{index:06}")
}

// ====================================================================
// Public entry points
// ====================================================================

/// Runs the simulation and returns the market series, per-trader tapes,
/// and completion diagnostics.
///
/// Identical parameters (including seed) produce bit-identical output.
pub fn simulate(params: &SimParams) -> Result<SimOutput> {
    let mut recorder = FullRecorder::new(params.n_traders as usize);
    let series = run_engine(params, &ParetoLaw { alpha: params.alpha }, &mut recorder)?;

    let tapes = recorder
        .ticks
        .into_iter()
        .zip(recorder.signs)
        .enumerate()
        .map(|(i, (ticks, signs))| {
            let days = vec![0u32; ticks.len()];
            let run_lengths = runs_from_parts(&signs, &days, DEFAULT_GAP_THRESHOLD_DAYS);
            let active_days = u64::from(!ticks.is_empty());
            TraderTape {
                trader_id: trader_label(i),
                ticks,
                signs,
                days,
                run_lengths,
                active_days,
            }
        })
        .collect();

    let n = series.len();
    Ok(SimOutput {
        series: SignSeries { signs: series, day_of_tick: vec![0; n] },
        tapes,
        completed_lengths: recorder.completed,
        reset_sign_balance: recorder.reset_sum.into_iter().zip(recorder.reset_count).collect(),
    })
}

/// Runs the simulation recording only the market sign series.
///
/// Draw-for-draw identical to [`simulate`]; used by calibration ensembles
/// where tapes are not needed.
pub fn simulate_signs(params: &SimParams) -> Result<Vec<i8>> {
    run_engine(params, &ParetoLaw { alpha: params.alpha }, &mut NullRecorder)
}

/// [`simulate`] with an explicit, possibly non-uniform intensity vector.
///
/// With an exactly uniform vector this is path-identical to [`simulate`]
/// without intensities at the same seed.
pub fn simulate_heterogeneous(params: &SimParams) -> Result<SimOutput> {
    if params.intensities.is_none() {
        return Err(Error::InvalidParameter(
            "simulate_heterogeneous requires an intensity vector".into(),
        ));
    }
    simulate(params)
}

// ====================================================================
// Tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    struct ConstantLaw(u64);

    impl LengthLaw for ConstantLaw {
        fn draw(&self, _: &mut ChaCha8Rng) -> u64 {
            self.0
        }
    }

    #[test]
    fn pareto_floor_closed_form() {
        // u = 0 gives the minimum length 1 for any alpha.
        assert_eq!(pareto_integer_from_uniform(0.0, 1.2), 1);
        assert_eq!(pareto_integer_from_uniform(0.0, 3.0), 1);
        // u = 0.99, alpha = 1.5: x = 0.01^(-2/3) = 21.544..., floor 21.
        assert_eq!(pareto_integer_from_uniform(0.99, 1.5), 21);
    }

    #[test]
    fn pareto_min_mass_matches_analytic_cdf() {
        // P(L = 1) = 1 - 2^(-alpha); check the empirical frequency at
        // alpha = 1.5 within four binomial standard errors.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let ones = (0..n)
            .filter(|_| sample_pareto_integer(&mut rng, 1.5).unwrap() == 1)
            .count();
        let p = 1.0 - 2f64.powf(-1.5);
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let observed = ones as f64 / n as f64;
        assert!(
            (observed - p).abs() < 4.0 * se,
            "observed {observed}, expected {p} +/- {}",
            4.0 * se
        );
    }

    #[test]
    fn pareto_rejects_bad_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_pareto_integer(&mut rng, 0.0).is_err());
        assert!(sample_pareto_integer(&mut rng, -1.0).is_err());
        assert!(sample_pareto_integer(&mut rng, f64::NAN).is_err());
        // alpha in (0, 1] is allowed by the sampler itself.
        assert!(sample_pareto_integer(&mut rng, 0.5).is_ok());
    }

    #[test]
    fn params_validation() {
        assert!(matches!(
            simulate(&SimParams::uniform(0, 10, 1.5, 1)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            simulate(&SimParams::uniform(5, 0, 1.5, 1)),
            Err(Error::EmptySeries(_))
        ));
        assert!(matches!(
            simulate(&SimParams::uniform(5, 10, 1.0, 1)),
            Err(Error::InvalidParameter(_))
        ));
        let bad_weights = SimParams {
            intensities: Some(vec![0.5, 0.4]),
            ..SimParams::uniform(2, 10, 1.5, 1)
        };
        assert!(matches!(simulate(&bad_weights), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn degenerate_unit_metaorders_are_fair_coin() {
        // With L = 1 forced, every tick emits a freshly drawn fair sign, so
        // the lag-1 sample autocorrelation is within 3/sqrt(N) of zero.
        let params = SimParams::uniform(1, 200_000, 1.5, 42);
        let mut recorder = NullRecorder;
        let series = run_engine(&params, &ConstantLaw(1), &mut recorder).unwrap();
        let n = series.len();
        let dot: i64 = series
            .windows(2)
            .map(|w| i64::from(w[0]) * i64::from(w[1]))
            .sum();
        let c1 = dot as f64 / (n - 1) as f64;
        assert!(c1.abs() < 3.0 / (n as f64).sqrt(), "C(1) = {c1}");
    }

    #[test]
    fn paired_metaorders_give_half_correlation() {
        // With L = 2 forced, adjacent ticks share a metaorder half the time,
        // so C(1) converges to 1/2.
        let params = SimParams::uniform(1, 1_000_000, 1.5, 43);
        let mut recorder = NullRecorder;
        let series = run_engine(&params, &ConstantLaw(2), &mut recorder).unwrap();
        let n = series.len();
        let dot: i64 = series
            .windows(2)
            .map(|w| i64::from(w[0]) * i64::from(w[1]))
            .sum();
        let c1 = dot as f64 / (n - 1) as f64;
        assert!((c1 - 0.5).abs() < 5.0 / (n as f64).sqrt(), "C(1) = {c1}");
    }

    #[test]
    fn same_seed_is_bit_identical_across_entry_points() {
        let params = SimParams::uniform(20, 50_000, 1.4, 7);
        let full_a = simulate(&params).unwrap();
        let full_b = simulate(&params).unwrap();
        let light = simulate_signs(&params).unwrap();
        assert_eq!(full_a.series, full_b.series);
        assert_eq!(full_a.series.signs, light);
    }

    #[test]
    fn different_seeds_diverge() {
        let a = simulate_signs(&SimParams::uniform(20, 10_000, 1.4, 7)).unwrap();
        let b = simulate_signs(&SimParams::uniform(20, 10_000, 1.4, 8)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn uniform_intensities_match_uniform_path() {
        let n = 8u32;
        let base = SimParams::uniform(n, 30_000, 1.5, 99);
        let explicit = SimParams {
            intensities: Some(vec![1.0 / n as f64; n as usize]),
            ..base.clone()
        };
        assert_eq!(
            simulate_signs(&base).unwrap(),
            simulate_signs(&explicit).unwrap()
        );
    }

    #[test]
    fn heterogeneous_selection_shares_match_intensities() {
        let params = SimParams {
            intensities: Some(vec![0.9, 0.1]),
            ..SimParams::uniform(2, 1_000_000, 1.5, 5)
        };
        let out = simulate_heterogeneous(&params).unwrap();
        let share = out.tapes[0].n_orders() as f64 / params.n_events as f64;
        assert!((share - 0.9).abs() < 0.003, "trader-0 share {share}");
    }

    #[test]
    fn superposition_identity_holds() {
        let params = SimParams::uniform(13, 20_000, 1.3, 21);
        let out = simulate(&params).unwrap();
        let mut reconstructed = vec![0i16; out.series.n_events()];
        let mut total = 0usize;
        for tape in &out.tapes {
            total += tape.ticks.len();
            for (tick, sign) in tape.ticks.iter().zip(&tape.signs) {
                let idx = (*tick - 1) as usize;
                assert_eq!(reconstructed[idx], 0, "two traders on one tick");
                reconstructed[idx] = i16::from(*sign);
            }
        }
        assert_eq!(total, out.series.n_events());
        let market: Vec<i16> = out.series.signs.iter().map(|&s| i16::from(s)).collect();
        assert_eq!(reconstructed, market);
    }

    #[test]
    fn completed_lengths_and_reset_balance() {
        let params = SimParams::uniform(10, 500_000, 1.5, 3);
        let out = simulate(&params).unwrap();
        // Mean completed length approaches zeta(1.5) = 2.612; loose window.
        let mean = out.completed_lengths.iter().sum::<u64>() as f64
            / out.completed_lengths.len() as f64;
        assert!((mean - 2.612).abs() < 0.1, "mean completed length {mean}");
        // Fair-coin signs at metaorder starts are balanced per trader.
        for (sum, count) in &out.reset_sign_balance {
            assert!(*count > 0);
            let bound = 4.0 * (*count as f64).sqrt();
            assert!(
                (*sum as f64).abs() <= bound,
                "reset sign sum {sum} exceeds 4*sqrt({count})"
            );
        }
    }

    #[test]
    fn truncated_final_metaorders_are_not_reported() {
        // Tiny run: with one trader and a forced length of 5, only complete
        // blocks of 5 are reported.
        let params = SimParams::uniform(1, 12, 1.5, 17);
        let mut recorder = FullRecorder::new(1);
        run_engine(&params, &ConstantLaw(5), &mut recorder).unwrap();
        assert_eq!(recorder.completed, vec![5, 5]);
    }
}
