//! The two reproduction tables: coding gains of the proposed and Golden
//! codes, and conventional versus square-grid APSK.

use serde::{Deserialize, Serialize};
use stbc_core::constellation::{make_apsk16_dvbs2, make_apsk8_conventional, make_proposed16, make_proposed8, make_psk, make_qam};
use stbc_core::gain::golden_coding_gain;
use stbc_core::optimize::optimize;
use stbc_core::{Constellation, GainEngine, Method, Normalization};

use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub code: String,
    pub constellation: String,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub apsk: String,
    pub min_distance: f64,
    pub u: f64,
    pub v: f64,
    pub gain: f64,
}

const UNIT: Normalization = Normalization::UnitAveragePower;

fn proposed_gain(c: &Constellation, workers: usize) -> crate::Result<(f64, f64, f64)> {
    let (r, _) = optimize(c)?;
    let engine = GainEngine::new(c, Method::auto(c))?;
    let rep = par::coding_gain_with(&engine, &r, workers)?;
    Ok((r.u(), r.v(), rep.gain))
}

/// Coding gains with unit-average-power symbols.
pub fn table1(workers: usize) -> crate::Result<Vec<Table1Row>> {
    let mut rows = Vec::new();
    for (name, c) in [("qam4", make_qam(4, UNIT)?), ("qam16", make_qam(16, UNIT)?)] {
        rows.push(Table1Row {
            code: "golden".into(),
            constellation: name.into(),
            gain: golden_coding_gain(&c)?.gain,
        });
    }
    for (name, c) in [
        ("qam4", make_qam(4, UNIT)?),
        ("qam16", make_qam(16, UNIT)?),
        ("psk8", make_psk(8, UNIT)?),
    ] {
        rows.push(Table1Row {
            code: "proposed".into(),
            constellation: name.into(),
            gain: proposed_gain(&c, workers)?.2,
        });
    }
    Ok(rows)
}

/// Conventional APSK with an optimized coefficient against square-grid
/// APSK with the integer-grid optimum, all at unit average power.
pub fn table2(workers: usize) -> crate::Result<Vec<Table2Row>> {
    let mut rows = Vec::new();
    for (name, c) in [
        ("conventional-8apsk", make_apsk8_conventional(UNIT)?),
        ("conventional-16apsk", make_apsk16_dvbs2(UNIT)?),
        ("proposed-8apsk", make_proposed8(UNIT)?),
        ("proposed-16apsk", make_proposed16(UNIT)?),
    ] {
        let (u, v, gain) = proposed_gain(&c, workers)?;
        rows.push(Table2Row {
            apsk: name.into(),
            min_distance: c.min_distance()?,
            u,
            v,
            gain,
        });
    }
    Ok(rows)
}

/// Comment lines with the values rounded to four decimals.
pub fn table1_rounded(rows: &[Table1Row]) -> Vec<String> {
    let mut out = vec!["rounded: code,constellation,gain".to_string()];
    out.extend(rows.iter().map(|r| format!("rounded: {},{},{:.4}", r.code, r.constellation, r.gain)));
    out
}

pub fn table2_rounded(rows: &[Table2Row]) -> Vec<String> {
    let mut out = vec!["rounded: apsk,min_distance,r,gain".to_string()];
    out.extend(rows.iter().map(|r| {
        let sign = if r.v < 0.0 { '-' } else { '+' };
        format!("rounded: {},{:.4},{:.4}{}j{:.4},{:.4}", r.apsk, r.min_distance, r.u, sign, r.v.abs(), r.gain)
    }));
    out
}
