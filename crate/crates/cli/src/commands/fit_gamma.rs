//! `fit-gamma`: long-memory exponent of a tape's market sign series by
//! the configured methods.

use serde_json::{json, Map, Value};

use oflow_core::{Method, Result};

use crate::commands::estimate_series;
use crate::config::{Context, MethodChoice, ResolvedFitGamma};
use crate::manifest::ArtifactWriter;
use crate::tape::load_tape;

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Acf => "acf",
        Method::Psd => "psd",
        Method::Dfa => "dfa",
    }
}

pub fn run(ctx: &Context, p: &ResolvedFitGamma) -> Result<()> {
    let loaded = load_tape(&p.tape, oflow_core::order_tape::DEFAULT_GAP_THRESHOLD_DAYS)?;
    let methods: Vec<Method> = match p.method {
        MethodChoice::All => vec![Method::Acf, Method::Psd, Method::Dfa],
        MethodChoice::Acf => vec![Method::Acf],
        MethodChoice::Psd => vec![Method::Psd],
        MethodChoice::Dfa => vec![Method::Dfa],
    };

    let mut doc = Map::new();
    let mut first_error = None;
    let mut n_ok = 0usize;
    for method in methods {
        match estimate_series(method, &loaded.series, p.tau_max) {
            Ok(report) => {
                println!(
                    "fit-gamma [{}]: gamma {:.4}{}",
                    method_name(method),
                    report.gamma,
                    report
                        .c0
                        .map(|c0| format!(", c0 {c0:.5}"))
                        .unwrap_or_default()
                );
                doc.insert(
                    method_name(method).to_string(),
                    serde_json::to_value(&report).unwrap_or(Value::Null),
                );
                n_ok += 1;
            }
            Err(err) => {
                println!("fit-gamma [{}]: failed: {err}", method_name(method));
                doc.insert(method_name(method).to_string(), json!({ "error": err.to_string() }));
                first_error.get_or_insert(err);
            }
        }
    }
    if n_ok == 0 {
        // Every requested method failed; the partial document is not
        // written and the first failure decides the exit status.
        return Err(first_error.expect("at least one method always runs"));
    }

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    writer.write_json("fit_gamma.json", &Value::Object(doc))?;
    writer.finish("fit-gamma", ctx, p)?;
    Ok(())
}
