//! Coding-gain sweeps spread over a thread pool. Partial minima merge in an
//! order-independent way, so the report does not depend on the worker count.

use rayon::prelude::*;
use stbc_core::gain::Partial;
use stbc_core::{Constellation, DesignCoefficient, GainEngine, GainReport, Method};

use crate::workers;

pub fn coding_gain_with(engine: &GainEngine, r: &DesignCoefficient, workers: usize) -> crate::Result<GainReport> {
    let units = engine.units();
    let chunk = units.div_ceil(workers.max(1) * 8).max(1);
    let pool = workers::pool(workers)?;
    let partial = pool.install(|| {
        (0..units)
            .step_by(chunk)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|lo| engine.sweep(r, lo..(lo + chunk).min(units)))
            .reduce(Partial::default, Partial::merge)
    });
    Ok(engine.report(r, partial))
}

pub fn coding_gain(c: &Constellation, r: &DesignCoefficient, method: Method, workers: usize) -> crate::Result<GainReport> {
    let engine = GainEngine::new(c, method)?;
    coding_gain_with(&engine, r, workers)
}
