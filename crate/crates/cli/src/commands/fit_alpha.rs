//! `fit-alpha`: tail-exponent fit of the pooled splitting-trader runs.
//!
//! Runs are the observable proxy for metaorder lengths, so the tail of the
//! pooled run-length distribution estimates the metaorder-length exponent.

use oflow_core::classify::classify_traders;
use oflow_core::powerlaw::clauset_fit;
use oflow_core::{Error, Result};

use crate::config::{Context, ResolvedFitAlpha};
use crate::manifest::{csv_bytes, ArtifactWriter};
use crate::tape::load_tape;

pub fn run(ctx: &Context, p: &ResolvedFitAlpha) -> Result<()> {
    let loaded = load_tape(&p.tape, p.gap_days)?;
    let result = classify_traders(&loaded.tapes, p.theta)?;

    let pooled: Vec<u64> = loaded
        .tapes
        .iter()
        .filter(|t| result.is_st(&t.trader_id))
        .flat_map(|t| t.run_lengths.iter().copied())
        .collect();
    if pooled.is_empty() {
        return Err(Error::InsufficientData(
            "no splitting traders were detected, so there are no runs to fit".into(),
        ));
    }
    let fit = clauset_fit(&pooled)?;

    let table = csv_bytes(|w| {
        w.write_record(["alpha", "xmin", "ks", "n_tail"])?;
        w.write_record([
            fit.alpha.to_string().as_str(),
            &fit.xmin.to_string(),
            &fit.ks_distance.to_string(),
            &fit.n_tail.to_string(),
        ])?;
        Ok(())
    })?;

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write("fit_alpha.csv", &table)?;
    writer.finish("fit-alpha", ctx, p)?;
    println!(
        "fit-alpha: alpha {:.4} (xmin {}, KS {:.4}, tail {} of {} runs from {} STs)",
        fit.alpha,
        fit.xmin,
        fit.ks_distance,
        fit.n_tail,
        pooled.len(),
        result.st_ids.len(),
    );
    Ok(())
}
