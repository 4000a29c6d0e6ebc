//! Synthetic tape emission and the tape-loading pipeline.
//!
//! A simulated market is serialized as an order-tape CSV with one
//! execution row per tick, laid out so that the full ingestion pipeline
//! (parse, desk resolution, session trimming, series construction)
//! reproduces exactly the simulated sign series: timestamps advance
//! uniformly through the two continuous-session windows and roll over to
//! the next business day every `orders_per_day` orders.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use oflow_core::order_tape::{
    build_sign_series, default_session_windows, parse_events, resolve_trading_desks,
    trim_sessions,
};
use oflow_core::{DeskMap, Result, SignSeries, SimOutput, TraderTape};

/// Seconds covered by the two default session windows (9:10-11:20 and
/// 12:40-14:50), which the synthetic timestamps sweep uniformly.
const MORNING_START_S: u64 = 9 * 3600 + 10 * 60;
const AFTERNOON_START_S: u64 = 12 * 3600 + 40 * 60;
const HALF_SESSION_NS: u128 = 7_800 * 1_000_000_000;
const SESSION_NS: u128 = 2 * HALF_SESSION_NS;

/// Timestamp of the tick with 0-based position `slot` among `per_day`
/// orders of business day `day`.
fn tick_timestamp_ns(day: u64, slot: u64, per_day: u64) -> i64 {
    let offset = SESSION_NS * slot as u128 / per_day as u128;
    let (start_s, within) = if offset < HALF_SESSION_NS {
        (MORNING_START_S, offset)
    } else {
        (AFTERNOON_START_S, offset - HALF_SESSION_NS)
    };
    let ns = day as u128 * 86_400 * 1_000_000_000
        + start_s as u128 * 1_000_000_000
        + within;
    ns as i64
}

/// Renders a simulation as an order-tape CSV.
///
/// Every tick becomes one execution row; the account id is the simulated
/// trader id and every order id is unique, so desk resolution maps each
/// account to its own desk.
pub fn render_tape_csv(sim: &SimOutput, orders_per_day: u64) -> Result<Vec<u8>> {
    // Owner of each tick, recovered from the per-trader tapes.
    let n = sim.series.n_events();
    let mut owner: Vec<u32> = vec![0; n];
    for (i, tape) in sim.tapes.iter().enumerate() {
        for &tick in &tape.ticks {
            owner[(tick - 1) as usize] = i as u32;
        }
    }

    crate::manifest::csv_bytes(|w| {
        w.write_record(["timestamp", "order_id", "account_id", "side", "kind", "day_index"])?;
        for (t, &sign) in sim.series.signs.iter().enumerate() {
            let day = t as u64 / orders_per_day;
            let slot = t as u64 % orders_per_day;
            let ts = tick_timestamp_ns(day, slot, orders_per_day);
            let side = if sign > 0 { "B" } else { "S" };
            w.write_record([
                ts.to_string().as_str(),
                &format!("E{t:09}"),
                &sim.tapes[owner[t] as usize].trader_id,
                side,
                "EXE",
                &day.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// A tape run through the full ingestion pipeline.
pub struct LoadedTape {
    pub series: SignSeries,
    pub tapes: Vec<TraderTape>,
    pub desks: DeskMap,
    /// Events parsed from the file before trimming.
    pub n_parsed: usize,
    /// Malformed rows skipped by the parser.
    pub n_skipped: usize,
}

/// Parses a tape CSV, resolves desks, trims to the continuous sessions,
/// and builds the market series plus per-desk tapes.
pub fn load_tape(path: &Path, gap_days: u32) -> Result<LoadedTape> {
    let file = File::open(path)?;
    let parsed = parse_events(BufReader::new(file))?;
    let desks = resolve_trading_desks(&parsed.events);
    let trimmed = trim_sessions(&parsed.events, &default_session_windows())?;
    let (series, tapes) = build_sign_series(&trimmed, &desks, gap_days)?;
    Ok(LoadedTape {
        series,
        tapes,
        desks,
        n_parsed: parsed.events.len(),
        n_skipped: parsed.skipped.len(),
    })
}
