//! Throwaway probe: alpha recovery from pooled ST runs vs completed
//! metaorder lengths, across seeds and tape sizes.

use oflow_core::classify::classify_traders;
use oflow_core::lmf_sim::{simulate, SimParams};
use oflow_core::powerlaw::clauset_fit;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_events: u64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1_000_000);
    let n_traders: u32 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(20);
    let seeds: Vec<u64> = if args.len() > 3 {
        args[3..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        vec![7]
    };
    for seed in seeds {
        let out = simulate(&SimParams::uniform(n_traders, n_events, 1.5, seed)).unwrap();
        let cls = classify_traders(&out.tapes, 0.01).unwrap();
        let pooled: Vec<u64> = out
            .tapes
            .iter()
            .filter(|t| cls.is_st(&t.trader_id))
            .flat_map(|t| t.run_lengths.iter().copied())
            .collect();
        let fit_runs = clauset_fit(&pooled).unwrap();
        let fit_mo = clauset_fit(&out.completed_lengths).unwrap();
        println!(
            "seed {seed}: {} ST runs -> alpha {:.4} (xmin {}, ntail {}); \
             {} metaorders -> alpha {:.4} (xmin {}, ntail {})",
            pooled.len(),
            fit_runs.alpha,
            fit_runs.xmin,
            fit_runs.n_tail,
            out.completed_lengths.len(),
            fit_mo.alpha,
            fit_mo.xmin,
            fit_mo.n_tail,
        );
    }
}
