//! `calibrate`: bias tables for the gamma estimators on a standard
//! simulated ensemble, persisted as reusable JSON.

use oflow_core::calibrate::{calibrate_bias, standard_ensemble};
use oflow_core::{Method, Result};

use crate::config::{CalibrateMethod, Context, ResolvedCalibrate};
use crate::manifest::ArtifactWriter;

pub fn run(ctx: &Context, p: &ResolvedCalibrate) -> Result<()> {
    let methods: Vec<Method> = match p.method {
        CalibrateMethod::Both => vec![Method::Acf, Method::Psd],
        CalibrateMethod::Acf => vec![Method::Acf],
        CalibrateMethod::Psd => vec![Method::Psd],
    };
    let ensemble = standard_ensemble(p.points, ctx.seed);

    let mut writer = ArtifactWriter::new(&ctx.out_dir)?;
    for method in methods {
        // The same seed for both methods makes them see identical
        // realizations, which pairs the tables for comparisons.
        let table = calibrate_bias(&ensemble, method, p.replicates, ctx.seed)?;
        let name = match method {
            Method::Acf => "calibration_acf.json",
            Method::Psd => "calibration_psd.json",
            Method::Dfa => unreachable!("dfa is not calibratable"),
        };
        writer.write_json(name, &table)?;
        println!(
            "calibrate [{:?}]: beta1 {:.3}, beta2 {:.3}, beta3 {:.3}, beta4 {:.3} \
             ({} points x {} replicates, {} dropped) -> {name}",
            method,
            table.beta1,
            table.beta2,
            table.beta3,
            table.beta4,
            p.points,
            p.replicates,
            table.dropped,
        );
    }
    writer.finish("calibrate", ctx, p)?;
    Ok(())
}
