//! Shared result types for the long-memory estimators.

use serde::{Deserialize, Serialize};

/// Sample autocorrelation of a sign series at lags 1..=tau_max.
#[derive(Debug, Clone, PartialEq)]
pub struct Acf {
    /// `values[i]` is C(lags[i]); lags run 1..=tau_max.
    pub lags: Vec<u64>,
    pub values: Vec<f64>,
    /// Length of the series the ACF was computed from.
    pub n_events: u64,
}

impl Acf {
    pub fn tau_max(&self) -> u64 {
        *self.lags.last().unwrap_or(&0)
    }

    /// C(tau) for tau in 1..=tau_max.
    pub fn value_at(&self, tau: u64) -> f64 {
        self.values[(tau - 1) as usize]
    }
}

/// One-sided periodogram estimate of the power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    /// omega_k = k / n_events for k = 1..=floor(n_events/2).
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub n_events: u64,
}

impl Psd {
    /// Frequency grid spacing, 1 / n_events.
    pub fn delta_omega(&self) -> f64 {
        1.0 / self.n_events as f64
    }
}

/// Which estimator produced a fit report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Acf,
    Psd,
    Dfa,
}

/// Parameters of the tentative two-component fit
/// C(tau) = c0_exp * exp(-tau/tau_temp) + c1 * tau^(-gamma_temp).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TentativeFit {
    /// Signed exponential amplitude: positive for a short-range transient
    /// sitting above the power law, negative when short lags bend below
    /// its extrapolation.
    pub c0_exp: f64,
    pub tau_temp: f64,
    pub c1: f64,
    pub gamma_temp: f64,
    /// Final relative-least-squares cost.
    pub residual: f64,
}

impl TentativeFit {
    /// Model value at lag tau.
    pub fn value_at(&self, tau: f64) -> f64 {
        self.c0_exp * (-tau / self.tau_temp).exp() + self.c1 * tau.powf(-self.gamma_temp)
    }
}

/// Fit internals surfaced for debugging and downstream filters.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    /// Tentative-fit parameters (ACF method only).
    pub tentative: Option<TentativeFit>,
    /// Fitted scale A of f(x) = A x^(-exponent).
    pub scale: f64,
    /// Final relative-least-squares cost of the window fit.
    pub residual: f64,
    /// Simplex iterations used by the window fit.
    pub iterations: u64,
    /// Points inside the window dropped for nonpositive values.
    pub dropped_points: usize,
    /// Points actually fitted.
    pub n_points: usize,
}

/// Outcome of a long-memory estimation.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub method: Method,
    /// Long-memory exponent of C(tau) ~ c0 tau^(-gamma).
    pub gamma: f64,
    /// ACF prefactor estimate; `None` for the DFA method.
    pub c0: Option<f64>,
    /// Fit window (lag units for acf/dfa, frequency units omega_k = k/N
    /// for psd).
    pub window: (f64, f64),
    pub diagnostics: Diagnostics,
}
