//! Invocation model: command-line definition, JSON configuration file, and
//! the merge of the two into validated per-command parameter sets.
//!
//! Precedence is fixed: built-in defaults, then the configuration file,
//! then command-line flags. Unknown configuration keys are rejected, and
//! every validation error names the offending field path.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use oflow_core::classify::DEFAULT_THETA;
use oflow_core::memory_est::DEFAULT_TAU_MAX;
use oflow_core::order_tape::DEFAULT_GAP_THRESHOLD_DAYS;
use oflow_core::{Error, Result};

// ====================================================================
// Command line
// ====================================================================

/// Experiment runner: simulation, classification, tail and memory
/// estimation, bias calibration, and standard experiment recipes.
#[derive(Debug, Parser)]
#[command(name = "oflow", version, about)]
pub struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory for artifacts and their manifests.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Master seed; every random stream derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Resource preset bounding series lengths and replicate counts.
    #[arg(long, global = true, value_enum)]
    pub scale: Option<Scale>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the splitting-trader model and write an order-tape CSV.
    Simulate(SimulateArgs),
    /// Split a tape's traders into splitting and random traders.
    Classify(ClassifyArgs),
    /// Fit the metaorder-length tail exponent from a tape's pooled runs.
    FitAlpha(FitAlphaArgs),
    /// Estimate the long-memory exponent of a tape's sign series.
    FitGamma(FitGammaArgs),
    /// Calibrate estimator bias tables on a simulated ensemble.
    Calibrate(CalibrateArgs),
    /// Scatter the unbiased memory exponent against the true exponent.
    Scatter(ScatterArgs),
    /// Rebuild the data files of a standard experiment.
    Reproduce(ReproduceArgs),
}

impl Command {
    /// Stable command name used in manifests and file names.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Classify(_) => "classify",
            Command::FitAlpha(_) => "fit-alpha",
            Command::FitGamma(_) => "fit-gamma",
            Command::Calibrate(_) => "calibrate",
            Command::Scatter(_) => "scatter",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Tail exponent of the metaorder-length law (> 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of splitting traders.
    #[arg(long = "n-st")]
    pub n_st: Option<u32>,
    /// Number of market orders to simulate.
    #[arg(long = "n-events")]
    pub n_events: Option<u64>,
    /// Market orders per business day on the synthetic tape.
    #[arg(long = "orders-per-day")]
    pub orders_per_day: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Order-tape CSV to classify.
    #[arg(long, value_name = "PATH")]
    pub tape: Option<PathBuf>,
    /// Significance level of the runs test.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Inactivity gap (business days) that terminates a run.
    #[arg(long = "gap-days")]
    pub gap_days: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct FitAlphaArgs {
    /// Order-tape CSV to fit.
    #[arg(long, value_name = "PATH")]
    pub tape: Option<PathBuf>,
    /// Significance level of the runs test selecting splitting traders.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Inactivity gap (business days) that terminates a run.
    #[arg(long = "gap-days")]
    pub gap_days: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct FitGammaArgs {
    /// Order-tape CSV whose market series is estimated.
    #[arg(long, value_name = "PATH")]
    pub tape: Option<PathBuf>,
    /// Estimation method; `all` runs every method.
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    /// Largest autocorrelation lag.
    #[arg(long = "tau-max")]
    pub tau_max: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Method to calibrate; `both` covers acf and psd.
    #[arg(long, value_enum)]
    pub method: Option<CalibrateMethod>,
    /// Ensemble size.
    #[arg(long)]
    pub points: Option<usize>,
    /// Replicates per ensemble point; defaults to the scale preset.
    #[arg(long)]
    pub replicates: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ScatterArgs {
    /// Calibration table JSON; computed in-run when absent.
    #[arg(long, value_name = "PATH")]
    pub calibration: Option<PathBuf>,
    /// Estimation method for the scatter points.
    #[arg(long, value_enum)]
    pub method: Option<GammaMethod>,
    /// Evaluation ensemble size.
    #[arg(long)]
    pub points: Option<usize>,
    /// Calibration replicates when no table is supplied.
    #[arg(long)]
    pub replicates: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Which standard experiment to rebuild.
    #[arg(value_enum)]
    pub target: Option<Target>,
    /// Calibration table JSON reused where one is needed.
    #[arg(long, value_name = "PATH")]
    pub calibration: Option<PathBuf>,
    /// Ensemble size for the bias panels; defaults to the scale preset.
    #[arg(long)]
    pub points: Option<usize>,
    /// Replicates per ensemble point; defaults to the scale preset.
    #[arg(long)]
    pub replicates: Option<u32>,
}

// ====================================================================
// Enumerations shared by flags and the config file
// ====================================================================

/// Resource preset. `desk` keeps runs laptop-sized; `full` matches the
/// reference experiment scale and is opt-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Full,
}

impl Scale {
    /// Largest permitted series length.
    pub fn max_events(self) -> u64 {
        match self {
            Scale::Desk => 10_000_000,
            Scale::Full => 100_000_000,
        }
    }

    /// Default replicate count for ensemble runs.
    pub fn replicates(self) -> u32 {
        match self {
            Scale::Desk => 20,
            Scale::Full => 100,
        }
    }

    /// Default ensemble size for the reproduce recipes.
    pub fn ensemble_points(self) -> usize {
        match self {
            Scale::Desk => 20,
            Scale::Full => 50,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Full => "full",
        }
    }
}

/// Gamma estimation method selection including `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    All,
    Acf,
    Psd,
    Dfa,
}

/// Calibration method selection including `both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrateMethod {
    Both,
    Acf,
    Psd,
}

/// A single calibratable method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaMethod {
    Acf,
    Psd,
}

impl GammaMethod {
    pub fn to_core(self) -> oflow_core::Method {
        match self {
            GammaMethod::Acf => oflow_core::Method::Acf,
            GammaMethod::Psd => oflow_core::Method::Psd,
        }
    }
}

/// Standard experiment recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Consistency, bias, and unbiased panels for the ACF estimator.
    AcfBias,
    /// Consistency, bias, and unbiased panels for the PSD estimator.
    PsdBias,
    /// Trader-count inference on homogeneous and heterogeneous runs.
    TraderCount,
    /// DFA slope comparison against the ACF estimator.
    DfaCheck,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::AcfBias => "acf-bias",
            Target::PsdBias => "psd-bias",
            Target::TraderCount => "trader-count",
            Target::DfaCheck => "dfa-check",
        }
    }
}

// ====================================================================
// Configuration file
// ====================================================================

/// JSON configuration mirror of the command line. Every block is
/// optional; unknown keys anywhere are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub scale: Option<Scale>,
    #[serde(default)]
    pub simulate: SimulateCfg,
    #[serde(default)]
    pub classify: ClassifyCfg,
    #[serde(default)]
    pub fit_alpha: FitAlphaCfg,
    #[serde(default)]
    pub fit_gamma: FitGammaCfg,
    #[serde(default)]
    pub calibrate: CalibrateCfg,
    #[serde(default)]
    pub scatter: ScatterCfg,
    #[serde(default)]
    pub reproduce: ReproduceCfg,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateCfg {
    pub alpha: Option<f64>,
    pub n_st: Option<u32>,
    pub n_events: Option<u64>,
    pub orders_per_day: Option<u64>,
    /// Selection weights; present means a heterogeneous-intensity run.
    pub intensities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyCfg {
    pub tape: Option<PathBuf>,
    pub theta: Option<f64>,
    pub gap_days: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitAlphaCfg {
    pub tape: Option<PathBuf>,
    pub theta: Option<f64>,
    pub gap_days: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitGammaCfg {
    pub tape: Option<PathBuf>,
    pub method: Option<MethodChoice>,
    pub tau_max: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateCfg {
    pub method: Option<CalibrateMethod>,
    pub points: Option<usize>,
    pub replicates: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterCfg {
    pub calibration: Option<PathBuf>,
    pub method: Option<GammaMethod>,
    pub points: Option<usize>,
    pub replicates: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceCfg {
    pub target: Option<Target>,
    pub calibration: Option<PathBuf>,
    pub points: Option<usize>,
    pub replicates: Option<u32>,
}

/// Reads and parses a JSON configuration file.
pub fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        Error::InvalidParameter(format!("config {}: {e}", path.display()))
    })
}

// ====================================================================
// Resolution
// ====================================================================

/// Fully resolved run-wide settings.
#[derive(Debug, Clone, Serialize)]
pub struct Context {
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub seed: u64,
    pub scale: Scale,
}

fn bad(path: &str, msg: impl Display) -> Error {
    Error::InvalidParameter(format!("{path}: {msg}"))
}

/// Picks the first present value: flag, then config, then default.
fn pick<T: Clone>(flag: &Option<T>, cfg: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| cfg.clone()).unwrap_or(default)
}

fn pick_required<T: Clone>(flag: &Option<T>, cfg: &Option<T>, path: &str) -> Result<T> {
    flag.clone()
        .or_else(|| cfg.clone())
        .ok_or_else(|| bad(path, "required but neither flag nor config supplies it"))
}

pub fn resolve_context(cli: &Cli, cfg: &FileConfig) -> Result<Context> {
    Ok(Context {
        out_dir: pick(&cli.out, &cfg.output_dir, PathBuf::from("oflow-out")),
        seed: pick(&cli.seed, &cfg.seed, 0),
        scale: pick(&cli.scale, &cfg.scale, Scale::Desk),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSimulate {
    pub alpha: f64,
    pub n_st: u32,
    pub n_events: u64,
    pub orders_per_day: u64,
    pub intensities: Option<Vec<f64>>,
}

pub fn resolve_simulate(
    args: &SimulateArgs,
    cfg: &FileConfig,
    ctx: &Context,
) -> Result<ResolvedSimulate> {
    let mut p = ResolvedSimulate {
        alpha: pick(&args.alpha, &cfg.simulate.alpha, 1.5),
        n_st: pick(&args.n_st, &cfg.simulate.n_st, 100),
        n_events: pick(&args.n_events, &cfg.simulate.n_events, 1_000_000),
        orders_per_day: pick(&args.orders_per_day, &cfg.simulate.orders_per_day, 10_000),
        intensities: cfg.simulate.intensities.clone(),
    };
    if !(p.alpha > 1.0) || !p.alpha.is_finite() {
        return Err(bad("simulate.alpha", format!("must be finite and > 1, got {}", p.alpha)));
    }
    if p.n_st == 0 {
        return Err(bad("simulate.n_st", "must be >= 1"));
    }
    if p.n_events == 0 {
        return Err(bad("simulate.n_events", "must be >= 1"));
    }
    if p.n_events > ctx.scale.max_events() {
        return Err(bad(
            "simulate.n_events",
            format!(
                "{} exceeds the {} scale cap {} (pass --scale full to raise it)",
                p.n_events,
                ctx.scale.name(),
                ctx.scale.max_events()
            ),
        ));
    }
    if p.orders_per_day == 0 {
        return Err(bad("simulate.orders_per_day", "must be >= 1"));
    }
    if let Some(weights) = &mut p.intensities {
        if weights.len() != p.n_st as usize {
            return Err(bad(
                "simulate.intensities",
                format!("{} weights for {} traders", weights.len(), p.n_st),
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(bad("simulate.intensities", "weights must be finite and positive"));
        }
        // Accept any positive weights and normalize them here, so the
        // resolved (and hashed) configuration is exactly what runs.
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedClassify {
    pub tape: PathBuf,
    pub theta: f64,
    pub gap_days: u32,
}

fn check_theta(theta: f64, path: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(bad(path, format!("must lie in [0, 1], got {theta}")));
    }
    Ok(())
}

pub fn resolve_classify(args: &ClassifyArgs, cfg: &FileConfig) -> Result<ResolvedClassify> {
    let p = ResolvedClassify {
        tape: pick_required(&args.tape, &cfg.classify.tape, "classify.tape")?,
        theta: pick(&args.theta, &cfg.classify.theta, DEFAULT_THETA),
        gap_days: pick(&args.gap_days, &cfg.classify.gap_days, DEFAULT_GAP_THRESHOLD_DAYS),
    };
    check_theta(p.theta, "classify.theta")?;
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedFitAlpha {
    pub tape: PathBuf,
    pub theta: f64,
    pub gap_days: u32,
}

pub fn resolve_fit_alpha(args: &FitAlphaArgs, cfg: &FileConfig) -> Result<ResolvedFitAlpha> {
    let p = ResolvedFitAlpha {
        tape: pick_required(&args.tape, &cfg.fit_alpha.tape, "fit_alpha.tape")?,
        theta: pick(&args.theta, &cfg.fit_alpha.theta, DEFAULT_THETA),
        gap_days: pick(&args.gap_days, &cfg.fit_alpha.gap_days, DEFAULT_GAP_THRESHOLD_DAYS),
    };
    check_theta(p.theta, "fit_alpha.theta")?;
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedFitGamma {
    pub tape: PathBuf,
    pub method: MethodChoice,
    pub tau_max: u64,
}

pub fn resolve_fit_gamma(args: &FitGammaArgs, cfg: &FileConfig) -> Result<ResolvedFitGamma> {
    let p = ResolvedFitGamma {
        tape: pick_required(&args.tape, &cfg.fit_gamma.tape, "fit_gamma.tape")?,
        method: pick(&args.method, &cfg.fit_gamma.method, MethodChoice::All),
        tau_max: pick(&args.tau_max, &cfg.fit_gamma.tau_max, DEFAULT_TAU_MAX),
    };
    if p.tau_max < 2 {
        return Err(bad("fit_gamma.tau_max", "must be >= 2"));
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedCalibrate {
    pub method: CalibrateMethod,
    pub points: usize,
    pub replicates: u32,
}

fn check_ensemble_size(points: usize, path: &str) -> Result<()> {
    if points < 2 {
        return Err(bad(path, "an ensemble needs at least 2 points"));
    }
    Ok(())
}

pub fn resolve_calibrate(
    args: &CalibrateArgs,
    cfg: &FileConfig,
    ctx: &Context,
) -> Result<ResolvedCalibrate> {
    let p = ResolvedCalibrate {
        method: pick(&args.method, &cfg.calibrate.method, CalibrateMethod::Both),
        points: pick(&args.points, &cfg.calibrate.points, 50),
        replicates: pick(&args.replicates, &cfg.calibrate.replicates, ctx.scale.replicates()),
    };
    check_ensemble_size(p.points, "calibrate.points")?;
    if p.replicates == 0 {
        return Err(bad("calibrate.replicates", "must be >= 1"));
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedScatter {
    pub calibration: Option<PathBuf>,
    pub method: GammaMethod,
    pub points: usize,
    pub replicates: u32,
}

pub fn resolve_scatter(
    args: &ScatterArgs,
    cfg: &FileConfig,
    ctx: &Context,
) -> Result<ResolvedScatter> {
    let p = ResolvedScatter {
        calibration: args.calibration.clone().or_else(|| cfg.scatter.calibration.clone()),
        method: pick(&args.method, &cfg.scatter.method, GammaMethod::Acf),
        points: pick(&args.points, &cfg.scatter.points, 50),
        replicates: pick(&args.replicates, &cfg.scatter.replicates, ctx.scale.replicates()),
    };
    check_ensemble_size(p.points, "scatter.points")?;
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedReproduce {
    pub target: Target,
    pub calibration: Option<PathBuf>,
    pub points: usize,
    pub replicates: u32,
}

pub fn resolve_reproduce(
    args: &ReproduceArgs,
    cfg: &FileConfig,
    ctx: &Context,
) -> Result<ResolvedReproduce> {
    let p = ResolvedReproduce {
        target: pick_required(&args.target, &cfg.reproduce.target, "reproduce.target")?,
        calibration: args.calibration.clone().or_else(|| cfg.reproduce.calibration.clone()),
        points: pick(&args.points, &cfg.reproduce.points, ctx.scale.ensemble_points()),
        replicates: pick(&args.replicates, &cfg.reproduce.replicates, ctx.scale.replicates()),
    };
    check_ensemble_size(p.points, "reproduce.points")?;
    if p.replicates == 0 {
        return Err(bad("reproduce.replicates", "must be >= 1"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<FileConfig>(r#"{"sneed": 1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        let err =
            serde_json::from_str::<FileConfig>(r#"{"simulate": {"alpa": 1.5}}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn precedence_flag_over_config_over_default() {
        let cfg: FileConfig =
            serde_json::from_str(r#"{"seed": 5, "simulate": {"alpha": 1.2}}"#).unwrap();
        let cli = Cli::parse_from(["oflow", "simulate", "--alpha", "1.8"]);
        let ctx = resolve_context(&cli, &cfg).unwrap();
        assert_eq!(ctx.seed, 5);
        assert_eq!(ctx.scale, Scale::Desk);
        let Command::Simulate(args) = &cli.command else { panic!() };
        let p = resolve_simulate(args, &cfg, &ctx).unwrap();
        assert_eq!(p.alpha, 1.8);
        assert_eq!(p.n_st, 100);
    }

    #[test]
    fn scale_caps_are_enforced_with_field_paths() {
        let cfg = FileConfig::default();
        let cli = Cli::parse_from(["oflow", "simulate", "--n-events", "20000000"]);
        let ctx = resolve_context(&cli, &cfg).unwrap();
        let Command::Simulate(args) = &cli.command else { panic!() };
        let err = resolve_simulate(args, &cfg, &ctx).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("simulate.n_events"), "{err}");

        let cli = Cli::parse_from([
            "oflow", "--scale", "full", "simulate", "--n-events", "20000000",
        ]);
        let ctx = resolve_context(&cli, &cfg).unwrap();
        let Command::Simulate(args) = &cli.command else { panic!() };
        assert!(resolve_simulate(args, &cfg, &ctx).is_ok());
    }

    #[test]
    fn missing_required_field_is_a_config_error() {
        let cfg = FileConfig::default();
        let cli = Cli::parse_from(["oflow", "classify"]);
        let Command::Classify(args) = &cli.command else { panic!() };
        let err = resolve_classify(args, &cfg).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("classify.tape"));
    }
}
