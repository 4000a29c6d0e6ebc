//! Experiment runner over the order-flow toolkit: simulation, trader
//! classification, tail and memory estimation, bias calibration, and
//! standard experiment recipes.
//!
//! Every run is deterministic in the `(command, seed, scale, parameters)`
//! tuple and writes its artifacts next to a manifest listing their SHA-256
//! digests, so identical invocations produce byte-identical outputs.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;
pub mod tape;

use oflow_core::{Error, Result};

pub use config::{Cli, Command};

/// Dispatches a parsed invocation: loads the config file if any, merges it
/// with the flags, and runs the selected command.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => config::load_file(path)?,
        None => config::FileConfig::default(),
    };
    let ctx = config::resolve_context(cli, &cfg)?;
    match &cli.command {
        Command::Simulate(args) => {
            commands::simulate::run(&ctx, &config::resolve_simulate(args, &cfg, &ctx)?)
        }
        Command::Classify(args) => {
            commands::classify::run(&ctx, &config::resolve_classify(args, &cfg)?)
        }
        Command::FitAlpha(args) => {
            commands::fit_alpha::run(&ctx, &config::resolve_fit_alpha(args, &cfg)?)
        }
        Command::FitGamma(args) => {
            commands::fit_gamma::run(&ctx, &config::resolve_fit_gamma(args, &cfg)?)
        }
        Command::Calibrate(args) => {
            commands::calibrate::run(&ctx, &config::resolve_calibrate(args, &cfg, &ctx)?)
        }
        Command::Scatter(args) => {
            commands::scatter::run(&ctx, &config::resolve_scatter(args, &cfg, &ctx)?)
        }
        Command::Reproduce(args) => {
            commands::reproduce::run(&ctx, &config::resolve_reproduce(args, &cfg, &ctx)?)
        }
    }
}

/// Process exit code for an error: 2 for configuration problems, 3 for
/// estimation failures, 4 for everything else (I/O and similar).
pub fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        2
    } else if err.is_estimation() {
        3
    } else {
        4
    }
}
