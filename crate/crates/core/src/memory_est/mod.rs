//! Long-memory estimation of sign series.
//!
//! Three estimators of the memory exponent gamma in C(tau) ~ c0 tau^(-gamma):
//!
//! * ACF method: exact sample autocorrelation, tentative
//!   exponential-plus-power fit to place the lower fit threshold,
//!   logarithmic smoothing, relative least-squares power-law fit, and a
//!   prefactor from the windowed ACF integral.
//! * PSD method: one-sided periodogram, linear smoothing, bandwidth
//!   selection, spectral power-law fit (gamma = 1 - H), and the prefactor
//!   through the Fourier pair of a power law.
//! * DFA method: detrended fluctuation analysis (gamma = 2 - 2h), kept as
//!   a reference for comparison runs; it carries no prefactor.

mod acf;
mod dfa;
mod psd;
mod rls;
mod types;

pub use acf::{
    acf_gamma, acf_prefactor, gamma_from_acf, log_smooth, lower_threshold, sample_acf,
    tentative_fit, upper_threshold, DEFAULT_DELTA, DEFAULT_TAU_MAX,
};
pub use dfa::{dfa_gamma, dfa_gamma_values};
pub use psd::{
    gamma_from_psd, periodogram, periodogram_real, psd_gamma, smooth_psd,
    SMOOTH_HALF_WIDTH,
};
pub use rls::{rls_powerlaw_fit, PowerlawFit};
pub use types::{Acf, Diagnostics, FitReport, Method, Psd, TentativeFit};
