//! Order-tape ingestion: CSV event parsing, trading-desk resolution,
//! session trimming, sign-series construction, and run decomposition.
//!
//! The pipeline turns a raw event tape into (a) the market-wide sign series
//! indexed by tick time (one increment per execution) and (b) one reduced
//! sign tape per trading desk. A trading desk merges every account id that
//! co-occurs with another inside a single order's life cycle, so a trader
//! operating several accounts is counted once.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use crate::error::{Error, Result};

/// Default inactivity rule: a run survives a gap of at most one business day.
pub const DEFAULT_GAP_THRESHOLD_DAYS: u32 = 1;

/// Maximum tolerated fraction of malformed data rows before the parse aborts.
const MAX_BAD_ROW_FRACTION: f64 = 0.01;

// ====================================================================
// Domain types
// ====================================================================

/// Order direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    /// Sign contribution of a market execution with this side.
    pub fn sign(self) -> i8 {
        match self {
            Side::Buy => 1,
            Side::Sell => -1,
        }
    }

    /// CSV code, `B` or `S`.
    pub fn code(self) -> &'static str {
        match self {
            Side::Buy => "B",
            Side::Sell => "S",
        }
    }

    fn parse(s: &str) -> Option<Side> {
        match s {
            "B" => Some(Side::Buy),
            "S" => Some(Side::Sell),
            _ => None,
        }
    }
}

/// Life-cycle stage of an order event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Submission,
    Cancellation,
    Execution,
}

impl EventKind {
    /// CSV code, `SUB`, `CAN` or `EXE`.
    pub fn code(self) -> &'static str {
        match self {
            EventKind::Submission => "SUB",
            EventKind::Cancellation => "CAN",
            EventKind::Execution => "EXE",
        }
    }

    fn parse(s: &str) -> Option<EventKind> {
        match s {
            "SUB" => Some(EventKind::Submission),
            "CAN" => Some(EventKind::Cancellation),
            "EXE" => Some(EventKind::Execution),
            _ => None,
        }
    }
}

/// One row of the order tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderEvent {
    /// Nanoseconds since epoch; only the intraday part is interpreted.
    pub timestamp_ns: i64,
    /// Identifier tying together the life cycle of one order.
    pub order_id: String,
    /// Raw account identifier as it appears on the tape.
    pub account_id: String,
    pub side: Side,
    pub kind: EventKind,
    /// Business-day ordinal of the event.
    pub day_index: u32,
}

/// A malformed row skipped during parsing.
#[derive(Debug, Clone)]
pub struct RowIssue {
    /// 1-based line number in the input (header is line 1).
    pub line: u64,
    pub message: String,
}

/// Parse result: events in file order plus the rows that were skipped.
#[derive(Debug)]
pub struct ParseOutcome {
    pub events: Vec<OrderEvent>,
    pub skipped: Vec<RowIssue>,
}

/// Assignment of account ids to trading desks.
///
/// The desk id is the lexicographically smallest account id of the merged
/// component, which makes the mapping deterministic and independent of event
/// order.
#[derive(Debug, Clone)]
pub struct DeskMap {
    assignments: BTreeMap<String, String>,
    n_desks: usize,
}

impl DeskMap {
    /// Desk id for an account observed during resolution.
    pub fn desk_of(&self, account_id: &str) -> Option<&str> {
        self.assignments.get(account_id).map(|s| s.as_str())
    }

    /// Number of distinct desks.
    pub fn n_desks(&self) -> usize {
        self.n_desks
    }

    /// Iterates (account_id, desk_id) in account order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.assignments.iter().map(|(a, d)| (a.as_str(), d.as_str()))
    }
}

/// Reduced sign tape of one trading desk.
#[derive(Debug, Clone)]
pub struct TraderTape {
    pub trader_id: String,
    /// Market tick times of this desk's executions, strictly increasing.
    pub ticks: Vec<u32>,
    /// Reduced signs aligned with `ticks`.
    pub signs: Vec<i8>,
    /// Business-day ordinal aligned with `ticks`.
    pub days: Vec<u32>,
    /// Run decomposition of `signs` under the inactivity gap rule.
    pub run_lengths: Vec<u64>,
    /// Number of distinct business days with at least one execution.
    pub active_days: u64,
}

impl TraderTape {
    /// Number of market orders on this tape.
    pub fn n_orders(&self) -> u64 {
        self.ticks.len() as u64
    }
}

/// Market-wide sign series in tick time.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSeries {
    /// One entry per execution, each +1 or -1.
    pub signs: Vec<i8>,
    /// Business-day ordinal aligned with `signs`.
    pub day_of_tick: Vec<u32>,
}

impl SignSeries {
    pub fn n_events(&self) -> usize {
        self.signs.len()
    }
}

/// Half-open intraday window [start_minute, end_minute) in minutes from midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionWindow {
    pub start_minute: u16,
    pub end_minute: u16,
}

impl SessionWindow {
    pub fn contains(&self, minute: u16) -> bool {
        (self.start_minute..self.end_minute).contains(&minute)
    }
}

/// Default continuous-session windows: 9:10-11:20 and 12:40-14:50.
///
/// The first and last ten minutes of each trading session are excluded to
/// avoid opening and closing auction effects.
pub fn default_session_windows() -> Vec<SessionWindow> {
    vec![
        SessionWindow { start_minute: 9 * 60 + 10, end_minute: 11 * 60 + 20 },
        SessionWindow { start_minute: 12 * 60 + 40, end_minute: 14 * 60 + 50 },
    ]
}

// ====================================================================
// Parsing
// ====================================================================

/// Parses an order-tape CSV with header
/// `timestamp,order_id,account_id,side,kind,day_index`.
///
/// Columns are located by name; extra columns are ignored. Malformed rows are
/// skipped and reported with their line numbers; if more than 1% of data rows
/// (and more than one row) are malformed, the parse aborts with a format
/// error.
pub fn parse_events<R: Read>(reader: R) -> Result<ParseOutcome> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::TapeFormat(format!("missing column '{name}'")))
    };
    let c_ts = col("timestamp")?;
    let c_order = col("order_id")?;
    let c_account = col("account_id")?;
    let c_side = col("side")?;
    let c_kind = col("kind")?;
    let c_day = col("day_index")?;

    let mut events = Vec::new();
    let mut skipped = Vec::new();
    let mut total_rows: u64 = 0;

    for record in csv_reader.records() {
        let record = record?;
        total_rows += 1;
        let line = record.position().map_or(0, |p| p.line());

        let mut bad = |message: String| skipped.push(RowIssue { line, message });

        let field = |idx: usize| record.get(idx);
        let (ts, order, account, side, kind, day) = match (
            field(c_ts),
            field(c_order),
            field(c_account),
            field(c_side),
            field(c_kind),
            field(c_day),
        ) {
            (Some(a), Some(b), Some(c), Some(d), Some(e), Some(f)) => (a, b, c, d, e, f),
            _ => {
                bad("row has fewer fields than the header".into());
                continue;
            }
        };

        let Ok(timestamp_ns) = ts.parse::<i64>() else {
            bad(format!("unparseable timestamp '{ts}'"));
            continue;
        };
        let Some(side) = Side::parse(side) else {
            bad(format!("unparseable side '{side}'"));
            continue;
        };
        let Some(kind) = EventKind::parse(kind) else {
            bad(format!("unparseable kind '{kind}'"));
            continue;
        };
        let Ok(day_index) = day.parse::<u32>() else {
            bad(format!("unparseable day_index '{day}'"));
            continue;
        };
        if order.is_empty() || account.is_empty() {
            bad("empty order_id or account_id".into());
            continue;
        }

        events.push(OrderEvent {
            timestamp_ns,
            order_id: order.to_string(),
            account_id: account.to_string(),
            side,
            kind,
            day_index,
        });
    }

    let tolerated = ((total_rows as f64) * MAX_BAD_ROW_FRACTION).floor().max(1.0) as u64;
    if skipped.len() as u64 > tolerated {
        let first = skipped.first().map(|i| i.line).unwrap_or(0);
        return Err(Error::TapeFormat(format!(
            "{} of {} rows malformed (tolerated {}); first bad row at line {}",
            skipped.len(),
            total_rows,
            tolerated,
            first
        )));
    }

    Ok(ParseOutcome { events, skipped })
}

// ====================================================================
// Desk resolution
// ====================================================================

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Merges account ids that share any order id into trading desks.
///
/// The induced partition depends only on the set of (order_id, account_id)
/// pairs, so any permutation of the input yields the same desks, and the
/// lexicographically smallest member names each desk.
pub fn resolve_trading_desks(events: &[OrderEvent]) -> DeskMap {
    // Number accounts by sorted name so that node indices, and with them the
    // whole resolution, depend only on the set of accounts present.
    let accounts: Vec<&str> = events
        .iter()
        .map(|e| e.account_id.as_str())
        .collect::<BTreeSet<&str>>()
        .into_iter()
        .collect();
    let account_index: HashMap<&str, usize> =
        accounts.iter().enumerate().map(|(i, &a)| (a, i)).collect();

    let mut uf = UnionFind::new(accounts.len());
    let mut first_account_of_order: HashMap<&str, usize> = HashMap::new();
    for event in events {
        let idx = account_index[event.account_id.as_str()];
        match first_account_of_order.entry(event.order_id.as_str()) {
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(idx);
            }
            std::collections::hash_map::Entry::Occupied(slot) => {
                uf.union(*slot.get(), idx);
            }
        }
    }

    // Lexicographically smallest member per component; accounts are already
    // sorted, so the first visitor of each root wins.
    let mut rep_of_root: HashMap<usize, &str> = HashMap::new();
    for (pos, account) in accounts.iter().enumerate() {
        let root = uf.find(pos);
        rep_of_root.entry(root).or_insert(account);
    }

    let mut assignments = BTreeMap::new();
    for (pos, account) in accounts.iter().enumerate() {
        let root = uf.find(pos);
        assignments.insert(account.to_string(), rep_of_root[&root].to_string());
    }
    let n_desks = rep_of_root.len();
    DeskMap { assignments, n_desks }
}

// ====================================================================
// Session trimming
// ====================================================================

fn intraday_minute(timestamp_ns: i64) -> u16 {
    let minutes = (timestamp_ns.div_euclid(60_000_000_000)).rem_euclid(1440);
    minutes as u16
}

fn validate_windows(windows: &[SessionWindow]) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::InvalidWindows("window list is empty".into()));
    }
    for w in windows {
        if w.start_minute >= w.end_minute || w.end_minute > 1440 {
            return Err(Error::InvalidWindows(format!(
                "window [{}, {}) is not a valid intraday interval",
                w.start_minute, w.end_minute
            )));
        }
    }
    let mut sorted = windows.to_vec();
    sorted.sort_by_key(|w| w.start_minute);
    for pair in sorted.windows(2) {
        if pair[1].start_minute < pair[0].end_minute {
            return Err(Error::InvalidWindows(format!(
                "windows [{}, {}) and [{}, {}) overlap",
                pair[0].start_minute, pair[0].end_minute, pair[1].start_minute, pair[1].end_minute
            )));
        }
    }
    Ok(())
}

/// Keeps only execution events whose intraday time falls inside a session
/// window; order is preserved. Non-execution events are always dropped.
pub fn trim_sessions(events: &[OrderEvent], windows: &[SessionWindow]) -> Result<Vec<OrderEvent>> {
    validate_windows(windows)?;
    Ok(events
        .iter()
        .filter(|e| e.kind == EventKind::Execution)
        .filter(|e| {
            let minute = intraday_minute(e.timestamp_ns);
            windows.iter().any(|w| w.contains(minute))
        })
        .cloned()
        .collect())
}

// ====================================================================
// Series construction and runs
// ====================================================================

/// Splits a reduced sign sequence into run lengths.
///
/// A run ends when the sign flips or when the business-day gap to the next
/// order exceeds `gap_threshold_days`. A run truncated by end-of-data is kept.
pub(crate) fn runs_from_parts(signs: &[i8], days: &[u32], gap_threshold_days: u32) -> Vec<u64> {
    debug_assert_eq!(signs.len(), days.len());
    let mut runs = Vec::new();
    let mut current: u64 = 0;
    for i in 0..signs.len() {
        current += 1;
        let last = i + 1 == signs.len();
        let breaks = if last {
            true
        } else {
            signs[i + 1] != signs[i] || days[i + 1].saturating_sub(days[i]) > gap_threshold_days
        };
        if breaks {
            runs.push(current);
            current = 0;
        }
    }
    runs
}

/// Run decomposition of a trader tape under the inactivity gap rule.
pub fn runs_decompose(tape: &TraderTape, gap_threshold_days: u32) -> Vec<u64> {
    runs_from_parts(&tape.signs, &tape.days, gap_threshold_days)
}

/// Builds the market sign series and one reduced tape per trading desk.
///
/// Only execution events are considered; tick time increments by one per
/// execution in input order. Run lengths on each tape are computed with
/// `gap_threshold_days`.
pub fn build_sign_series(
    events: &[OrderEvent],
    desks: &DeskMap,
    gap_threshold_days: u32,
) -> Result<(SignSeries, Vec<TraderTape>)> {
    let executions: Vec<&OrderEvent> =
        events.iter().filter(|e| e.kind == EventKind::Execution).collect();
    if executions.is_empty() {
        return Err(Error::EmptySeries("no execution events".into()));
    }
    if executions.len() > u32::MAX as usize - 1 {
        return Err(Error::InvalidParameter(format!(
            "{} executions exceed the supported tick range",
            executions.len()
        )));
    }

    let mut signs = Vec::with_capacity(executions.len());
    let mut day_of_tick = Vec::with_capacity(executions.len());
    // trader id -> (ticks, signs, days)
    let mut per_desk: BTreeMap<&str, (Vec<u32>, Vec<i8>, Vec<u32>)> = BTreeMap::new();

    for (pos, event) in executions.iter().enumerate() {
        let tick = (pos + 1) as u32;
        let sign = event.side.sign();
        signs.push(sign);
        day_of_tick.push(event.day_index);
        // Accounts missing from the desk map stand alone under their own id.
        let trader = desks.desk_of(&event.account_id).unwrap_or(&event.account_id);
        let slot = per_desk.entry(trader).or_default();
        slot.0.push(tick);
        slot.1.push(sign);
        slot.2.push(event.day_index);
    }

    let tapes = per_desk
        .into_iter()
        .map(|(trader_id, (ticks, signs, days))| {
            let run_lengths = runs_from_parts(&signs, &days, gap_threshold_days);
            let active_days = days.iter().collect::<BTreeSet<_>>().len() as u64;
            TraderTape {
                trader_id: trader_id.to_string(),
                ticks,
                signs,
                days,
                run_lengths,
                active_days,
            }
        })
        .collect();

    Ok((SignSeries { signs, day_of_tick }, tapes))
}

// ====================================================================
// Tests
// ====================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn event(
        ts: i64,
        order: &str,
        account: &str,
        side: Side,
        kind: EventKind,
        day: u32,
    ) -> OrderEvent {
        OrderEvent {
            timestamp_ns: ts,
            order_id: order.into(),
            account_id: account.into(),
            side,
            kind,
            day_index: day,
        }
    }

    const HEADER: &str = "timestamp,order_id,account_id,side,kind,day_index\n";

    #[test]
    fn parse_three_wellformed_rows() {
        let data = format!(
            "{HEADER}1000,O1,V1,B,SUB,0\n2000,O1,V1,B,EXE,0\n3000,O2,V2,S,CAN,1\n"
        );
        let out = parse_events(data.as_bytes()).unwrap();
        assert_eq!(out.events.len(), 3);
        assert!(out.skipped.is_empty());
        assert_eq!(out.events[0].order_id, "O1");
        assert_eq!(out.events[1].kind, EventKind::Execution);
        assert_eq!(out.events[2].side, Side::Sell);
        assert_eq!(out.events[2].day_index, 1);
    }

    #[test]
    fn parse_empty_file_with_header() {
        let out = parse_events(HEADER.as_bytes()).unwrap();
        assert!(out.events.is_empty());
        assert!(out.skipped.is_empty());
    }

    #[test]
    fn parse_skips_bad_side_and_records_line() {
        let data = format!(
            "{HEADER}1000,O1,V1,B,EXE,0\n2000,O2,V1,hold,EXE,0\n3000,O3,V1,S,EXE,0\n"
        );
        let out = parse_events(data.as_bytes()).unwrap();
        assert_eq!(out.events.len(), 2);
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].line, 3);
        assert!(out.skipped[0].message.contains("side"));
    }

    #[test]
    fn parse_missing_column_is_format_error() {
        let data = "timestamp,order_id,account_id,side,day_index\n1,O1,V1,B,0\n";
        let err = parse_events(data.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::TapeFormat(_)), "{err}");
    }

    #[test]
    fn parse_aborts_beyond_bad_row_tolerance() {
        let mut data = HEADER.to_string();
        for i in 0..300u32 {
            if i % 50 == 0 {
                data.push_str(&format!("{i},O{i},V1,hold,EXE,0\n"));
            } else {
                data.push_str(&format!("{i},O{i},V1,B,EXE,0\n"));
            }
        }
        // 6 bad rows out of 300 exceeds the 1% tolerance.
        let err = parse_events(data.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::TapeFormat(_)), "{err}");
    }

    #[test]
    fn desks_merge_on_shared_order_id() {
        // O1 lives entirely on V1; O2 is submitted from V1 and cancelled
        // from V2, so V1 and V2 belong to one desk.
        let events = vec![
            event(1, "O1", "V1", Side::Buy, EventKind::Submission, 0),
            event(2, "O1", "V1", Side::Buy, EventKind::Cancellation, 0),
            event(3, "O2", "V1", Side::Buy, EventKind::Submission, 0),
            event(4, "O2", "V2", Side::Buy, EventKind::Cancellation, 0),
        ];
        let desks = resolve_trading_desks(&events);
        assert_eq!(desks.n_desks(), 1);
        assert_eq!(desks.desk_of("V1"), Some("V1"));
        assert_eq!(desks.desk_of("V2"), Some("V1"));
    }

    #[test]
    fn desks_without_sharing_stay_separate() {
        let events = vec![
            event(1, "O1", "V1", Side::Buy, EventKind::Execution, 0),
            event(2, "O2", "V2", Side::Sell, EventKind::Execution, 0),
        ];
        let desks = resolve_trading_desks(&events);
        assert_eq!(desks.n_desks(), 2);
        assert_eq!(desks.desk_of("V1"), Some("V1"));
        assert_eq!(desks.desk_of("V2"), Some("V2"));
    }

    #[test]
    fn desks_chain_transitively() {
        let events = vec![
            event(1, "Oa", "V1", Side::Buy, EventKind::Submission, 0),
            event(2, "Oa", "V2", Side::Buy, EventKind::Cancellation, 0),
            event(3, "Ob", "V2", Side::Buy, EventKind::Submission, 0),
            event(4, "Ob", "V3", Side::Buy, EventKind::Cancellation, 0),
        ];
        let desks = resolve_trading_desks(&events);
        assert_eq!(desks.n_desks(), 1);
        for account in ["V1", "V2", "V3"] {
            assert_eq!(desks.desk_of(account), Some("V1"));
        }
    }

    #[test]
    fn trim_drops_outside_default_windows() {
        let at_minute = |m: i64| m * 60_000_000_000;
        let events = vec![
            event(at_minute(9 * 60 + 5), "O1", "V1", Side::Buy, EventKind::Execution, 0),
            event(at_minute(10 * 60), "O2", "V1", Side::Buy, EventKind::Execution, 0),
            event(at_minute(10 * 60 + 1), "O3", "V1", Side::Buy, EventKind::Submission, 0),
        ];
        let kept = trim_sessions(&events, &default_session_windows()).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].order_id, "O2");
    }

    #[test]
    fn trim_full_day_window_is_identity_on_executions() {
        let events = vec![
            event(12345, "O1", "V1", Side::Buy, EventKind::Execution, 0),
            event(999_999_999_999, "O2", "V2", Side::Sell, EventKind::Execution, 3),
        ];
        let full = vec![SessionWindow { start_minute: 0, end_minute: 1440 }];
        assert_eq!(trim_sessions(&events, &full).unwrap(), events);
    }

    #[test]
    fn trim_rejects_bad_window_lists() {
        let overlap = vec![
            SessionWindow { start_minute: 100, end_minute: 300 },
            SessionWindow { start_minute: 200, end_minute: 400 },
        ];
        assert!(matches!(trim_sessions(&[], &overlap), Err(Error::InvalidWindows(_))));
        assert!(matches!(trim_sessions(&[], &[]), Err(Error::InvalidWindows(_))));
        let inverted = vec![SessionWindow { start_minute: 300, end_minute: 100 }];
        assert!(matches!(trim_sessions(&[], &inverted), Err(Error::InvalidWindows(_))));
    }

    #[test]
    fn build_single_trader_is_identity() {
        let events = vec![
            event(1, "O1", "V1", Side::Buy, EventKind::Execution, 0),
            event(2, "O2", "V1", Side::Sell, EventKind::Execution, 0),
        ];
        let desks = resolve_trading_desks(&events);
        let (series, tapes) = build_sign_series(&events, &desks, 1).unwrap();
        assert_eq!(series.signs, vec![1, -1]);
        assert_eq!(tapes.len(), 1);
        assert_eq!(tapes[0].ticks, vec![1, 2]);
        assert_eq!(tapes[0].signs, vec![1, -1]);
    }

    #[test]
    fn build_superposition_tiles_market_series() {
        // Three interleaved traders on a 9-event tape; padding each tape
        // back onto the tick axis must reproduce the market series exactly.
        let spec: [(&str, Side); 9] = [
            ("A", Side::Buy),
            ("B", Side::Sell),
            ("A", Side::Buy),
            ("C", Side::Sell),
            ("C", Side::Buy),
            ("B", Side::Buy),
            ("A", Side::Sell),
            ("C", Side::Buy),
            ("B", Side::Sell),
        ];
        let events: Vec<OrderEvent> = spec
            .iter()
            .enumerate()
            .map(|(i, (account, side))| {
                event(i as i64, &format!("O{i}"), account, *side, EventKind::Execution, 0)
            })
            .collect();
        let desks = resolve_trading_desks(&events);
        let (series, tapes) = build_sign_series(&events, &desks, 1).unwrap();

        let mut reconstructed = vec![0i16; series.n_events()];
        let mut total_ticks = 0;
        for tape in &tapes {
            total_ticks += tape.ticks.len();
            for (tick, sign) in tape.ticks.iter().zip(&tape.signs) {
                reconstructed[(*tick - 1) as usize] += i16::from(*sign);
            }
        }
        assert_eq!(total_ticks, series.n_events());
        let market: Vec<i16> = series.signs.iter().map(|&s| i16::from(s)).collect();
        assert_eq!(reconstructed, market);
    }

    #[test]
    fn build_rejects_empty_execution_set() {
        let events = vec![event(1, "O1", "V1", Side::Buy, EventKind::Submission, 0)];
        let desks = resolve_trading_desks(&events);
        assert!(matches!(
            build_sign_series(&events, &desks, 1),
            Err(Error::EmptySeries(_))
        ));
    }

    #[test]
    fn runs_split_on_flips() {
        let signs = [1, 1, 1, 1, -1, -1, -1, 1];
        let days = [0u32; 8];
        assert_eq!(runs_from_parts(&signs, &days, 1), vec![4, 3, 1]);
    }

    #[test]
    fn runs_single_order() {
        assert_eq!(runs_from_parts(&[1], &[0], 1), vec![1]);
    }

    #[test]
    fn runs_split_on_long_gap() {
        // Same sign, but a 30-business-day gap breaks the run.
        assert_eq!(runs_from_parts(&[1, 1], &[0, 30], 1), vec![1, 1]);
        // A one-day gap does not.
        assert_eq!(runs_from_parts(&[1, 1], &[0, 1], 1), vec![2]);
    }

    proptest! {
        #[test]
        fn runs_always_sum_to_order_count(
            signs in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..200),
            gaps in proptest::collection::vec(0u32..5, 0..200),
        ) {
            let n = signs.len().min(gaps.len());
            let signs = &signs[..n];
            let mut days = Vec::with_capacity(n);
            let mut day = 0u32;
            for gap in &gaps[..n] {
                day += gap;
                days.push(day);
            }
            let runs = runs_from_parts(signs, &days, 1);
            prop_assert_eq!(runs.iter().sum::<u64>(), n as u64);
            prop_assert!(runs.iter().all(|&r| r >= 1));
        }

        #[test]
        fn desk_partition_is_permutation_invariant(
            links in proptest::collection::vec((0u8..8, 0u8..6), 1..30),
            seed in 0u64..1000,
        ) {
            let events: Vec<OrderEvent> = links
                .iter()
                .map(|(order, account)| event(
                    0,
                    &format!("O{order}"),
                    &format!("V{account}"),
                    Side::Buy,
                    EventKind::Submission,
                    0,
                ))
                .collect();
            let baseline = resolve_trading_desks(&events);

            // Deterministic shuffle of the event order.
            let mut permuted = events.clone();
            let mut state = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
            for i in (1..permuted.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let j = (state % (i as u64 + 1)) as usize;
                permuted.swap(i, j);
            }
            let shuffled = resolve_trading_desks(&permuted);

            prop_assert_eq!(baseline.n_desks(), shuffled.n_desks());
            for (account, desk) in baseline.iter() {
                prop_assert_eq!(Some(desk), shuffled.desk_of(account));
            }
        }

        #[test]
        fn trim_is_idempotent(
            minutes in proptest::collection::vec(0i64..1440, 0..50),
        ) {
            let events: Vec<OrderEvent> = minutes
                .iter()
                .enumerate()
                .map(|(i, m)| event(
                    m * 60_000_000_000,
                    &format!("O{i}"),
                    "V1",
                    Side::Buy,
                    EventKind::Execution,
                    0,
                ))
                .collect();
            let windows = default_session_windows();
            let once = trim_sessions(&events, &windows).unwrap();
            let twice = trim_sessions(&once, &windows).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
