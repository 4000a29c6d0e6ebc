//! `classify`: runs-test classification of a tape's traders, with the
//! pooled run-length CCDF of each class.

use oflow_core::classify::{classify_traders, st_statistics};
use oflow_core::powerlaw::empirical_ccdf;
use oflow_core::Result;

use crate::config::{Context, ResolvedClassify};
use crate::manifest::{csv_bytes, ArtifactWriter};
use crate::tape::load_tape;

pub fn run(ctx: &Context, p: &ResolvedClassify) -> Result<()> {
    let loaded = load_tape(&p.tape, p.gap_days)?;
    let result = classify_traders(&loaded.tapes, p.theta)?;

    let classification = csv_bytes(|w| {
        w.write_record(["trader_id", "n_mo", "n_run", "p_value", "label"])?;
        for tape in &loaded.tapes {
            let label = if result.is_st(&tape.trader_id) { "ST" } else { "RT" };
            w.write_record([
                tape.trader_id.as_str(),
                &tape.n_orders().to_string(),
                &tape.run_lengths.len().to_string(),
                &result.p_values[&tape.trader_id].to_string(),
                label,
            ])?;
        }
        Ok(())
    })?;

    let mut st_runs: Vec<u64> = Vec::new();
    let mut rt_runs: Vec<u64> = Vec::new();
    for tape in &loaded.tapes {
        let pool = if result.is_st(&tape.trader_id) { &mut st_runs } else { &mut rt_runs };
        pool.extend_from_slice(&tape.run_lengths);
    }
    let run_ccdf = csv_bytes(|w| {
        w.write_record(["class", "run_length", "ccdf"])?;
        for (class, runs) in [("ST", &st_runs), ("RT", &rt_runs)] {
            if runs.is_empty() {
                continue;
            }
            for (length, tail) in empirical_ccdf(runs)? {
                w.write_record([class, &length.to_string(), &tail.to_string()])?;
            }
        }
        Ok(())
    })?;

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write("classification.csv", &classification)?;
    writer.write("run_ccdf.csv", &run_ccdf)?;
    writer.finish("classify", ctx, p)?;

    let stats = st_statistics(&result, &loaded.tapes, loaded.series.n_events() as u64);
    println!(
        "classify: {} ST / {} RT over {} orders (ST order share {:.3}); \
         {} malformed rows skipped",
        result.st_ids.len(),
        result.rt_ids.len(),
        loaded.series.n_events(),
        stats.st_mo_share,
        loaded.n_skipped,
    );
    Ok(())
}
