//! `simulate`: run the splitting-trader model and emit an order tape.

use oflow_core::lmf_sim::simulate;
use oflow_core::{Result, SimParams};

use crate::config::{Context, ResolvedSimulate};
use crate::manifest::ArtifactWriter;
use crate::tape::render_tape_csv;

pub fn run(ctx: &Context, p: &ResolvedSimulate) -> Result<()> {
    let params = SimParams {
        n_traders: p.n_st,
        n_events: p.n_events,
        alpha: p.alpha,
        seed: ctx.seed,
        intensities: p.intensities.clone(),
    };
    let sim = simulate(&params)?;
    let tape = render_tape_csv(&sim, p.orders_per_day)?;

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write("tape.csv", &tape)?;
    writer.finish("simulate", ctx, p)?;
    println!(
        "simulate: {} orders by {} traders (alpha {}, seed {}) -> tape.csv",
        p.n_events, p.n_st, p.alpha, ctx.seed
    );
    Ok(())
}
