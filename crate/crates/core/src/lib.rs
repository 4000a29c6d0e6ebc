//! Simulation and estimation toolkit for order-splitting dynamics in
//! market order flow.
//!
//! The crate covers the full chain from raw order tapes to the quantities
//! that characterize persistent order flow:
//!
//! - [`order_tape`]: CSV ingestion, trading-desk resolution, session
//!   trimming, sign-series construction, and run decomposition.
//! - [`lmf_sim`]: Monte-Carlo simulator of the uniform and
//!   heterogeneous-intensity splitting-trader model, plus the power-law
//!   integer sampler feeding it.
//! - [`classify`]: exact binomial runs-test classification of traders into
//!   splitting and random traders, with summary statistics.
//! - [`powerlaw`]: empirical CCDFs, tail-exponent fitting with automatic
//!   cutoff selection, and the geometric decay-length estimator.
//! - [`memory_est`]: sign-autocorrelation and periodogram pipelines with
//!   smoothing, automatic fit windows, relative least-squares power-law
//!   fits, and a detrended-fluctuation reference estimator.
//! - [`calibrate`]: Monte-Carlo bias calibration of the memory estimators,
//!   prefactor theory, and inference of the splitting-trader count.
//! - [`rng`]: deterministic seed and stream derivation shared by every
//!   stochastic component, including downstream experiment runners.

pub mod calibrate;
pub mod classify;
pub mod error;
pub mod lmf_sim;
pub mod memory_est;
pub mod numeric;
pub mod order_tape;
pub mod powerlaw;
pub mod rng;

pub use calibrate::CalibrationTable;
pub use error::{Error, Result};
pub use lmf_sim::{SimOutput, SimParams};
pub use memory_est::{FitReport, Method};
pub use order_tape::{DeskMap, OrderEvent, SignSeries, TraderTape};
pub use powerlaw::TailFit;
