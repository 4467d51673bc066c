//! Choice of the design coefficient r = u + jv.
//!
//! For Case I tuples (A = B) the determinant is 2(A t − d̃₂)² with t = u − v,
//! so the Case I coding gain is 2 f(t)² where
//!
//! ```text
//! f(t) = min over attainable (A, d̃₂) of |A t − d̃₂|,   t ∈ [−√2, √2].
//! ```
//!
//! f is the lower envelope of V-shaped lines, hence piecewise linear, and its
//! maximum sits at an interval endpoint or at the crossing of a rising piece
//! A₁t − d₁ with a falling piece d₂ − A₂t, t = (d₁ + d₂)/(A₁ + A₂). Each row
//! of the table is a sawtooth; the envelope of all rows is built by pairwise
//! merging and every local maximum on it is examined.
//!
//! The Case II minimum is then checked at the chosen t with the gain engine.
//! On integer grids the optimum is known in closed form: t = ±1/2.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Float;

use crate::code::{classify, Branch, Case, DesignCoefficient, DifferenceTuple, Provenance};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::gain::{GainEngine, GainReport, Method};
use crate::quant;

/// The four integer-grid optima: u − v = ±1/2 with either square root,
/// principal candidate first (u = (1+√7)/4, v = (−1+√7)/4).
pub fn analytic_integer_optimum() -> [DesignCoefficient; 4] {
    let mk = |t: f64, b: Branch| {
        DesignCoefficient::from_difference(t, b, Provenance::AnalyticTheorem1)
            .expect("|t| = 1/2 is inside the admissible range")
    };
    [
        mk(0.5, Branch::Plus),
        mk(0.5, Branch::Minus),
        mk(-0.5, Branch::Plus),
        mk(-0.5, Branch::Minus),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaseOneEntry {
    /// d̃₂ in working units.
    pub d: f64,
    /// A tuple realizing (A, d̃₂), in the constellation's own units.
    pub witness: DifferenceTuple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseOneRow {
    /// A = B in working units.
    pub a: f64,
    /// Sorted by `d`, distinct.
    pub entries: Vec<CaseOneEntry>,
}

/// Every attainable A (with A = B) and, per A, every attainable d̃₂.
///
/// Values are kept in working units: grid units for integer-grid
/// constellations (so A and d̃₂ are integers) and the constellation's own
/// units otherwise. Multiply by `scale()²` to convert.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseOneTable {
    rows: Vec<CaseOneRow>,
    scale: f64,
    exact: bool,
}

impl CaseOneTable {
    pub fn rows(&self) -> &[CaseOneRow] {
        &self.rows
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(|r| r.entries.len()).sum()
    }

    /// min |A t − d̃₂| over the table in working units, with the entry that
    /// attains it.
    pub fn objective_working(&self, t: f64) -> (f64, &CaseOneEntry) {
        let mut best = f64::INFINITY;
        let mut arg = &self.rows[0].entries[0];
        for row in &self.rows {
            let target = row.a * t;
            let es = &row.entries;
            let k = es.partition_point(|e| e.d < target);
            for idx in [k.wrapping_sub(1), k] {
                if let Some(e) = es.get(idx) {
                    let v = (row.a * t - e.d).abs();
                    if v < best {
                        best = v;
                        arg = e;
                    }
                }
            }
        }
        (best, arg)
    }

    /// min |d̃₁ − d̃₂| at u − v = t, in the constellation's units.
    pub fn objective(&self, t: f64) -> f64 {
        self.objective_working(t).0 * self.scale * self.scale
    }
}

pub fn build_case1_table(c: &Constellation) -> Result<CaseOneTable> {
    let engine = GainEngine::new(c, Method::Aggregated)?;
    let groups = engine.build_groups();
    let exact = engine.is_exact();
    let scale = engine.working_scale();
    let mut rows: BTreeMap<i64, (f64, BTreeMap<i64, CaseOneEntry>)> = BTreeMap::new();
    for (i, gi) in groups.iter().enumerate() {
        for gj in &groups[i..] {
            let a = gi.a + gj.a;
            let b = gi.b + gj.b;
            if a == 0.0 || classify(a, b) != Case::I {
                continue;
            }
            let rk = if exact { a as i64 } else { quant::key(a) };
            let row = rows.entry(rk).or_insert_with(|| (a, BTreeMap::new()));
            for x in &gi.entries {
                for y in &gj.entries {
                    let d = x.e + y.e;
                    let dk = if exact { d as i64 } else { quant::key(d) };
                    row.1.entry(dk).or_insert_with(|| CaseOneEntry {
                        d,
                        witness: DifferenceTuple([x.x, y.x, x.y, y.y]).scaled(scale),
                    });
                }
            }
        }
    }
    Ok(CaseOneTable {
        rows: rows
            .into_values()
            .map(|(a, entries)| CaseOneRow {
                a,
                entries: entries.into_values().collect(),
            })
            .collect(),
        scale,
        exact,
    })
}

/// value = slope·t + intercept.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Line {
    slope: f64,
    intercept: f64,
}

impl Line {
    fn at(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }

    fn crossing(&self, o: &Line) -> f64 {
        (o.intercept - self.intercept) / (self.slope - o.slope)
    }
}

/// Piecewise-linear function on [lo, hi]: piece k covers
/// [starts[k], starts[k+1]] (the last one ends at hi).
#[derive(Clone, Debug)]
struct Piecewise {
    starts: Vec<f64>,
    lines: Vec<Line>,
}

impl Piecewise {
    fn push(&mut self, x: f64, line: Line) {
        if let Some(&last) = self.starts.last() {
            if x <= last {
                // zero-length piece
                self.starts.pop();
                self.lines.pop();
            }
        }
        if let Some(prev) = self.lines.last() {
            if *prev == line {
                return;
            }
        }
        self.starts.push(x);
        self.lines.push(line);
    }

    /// a·dist(t, {d/a}) for one table row.
    fn sawtooth(a: f64, entries: &[CaseOneEntry], lo: f64, hi: f64) -> Piecewise {
        let mut seq: Vec<(f64, Line)> = Vec::with_capacity(2 * entries.len());
        for (k, e) in entries.iter().enumerate() {
            let fall = Line { slope: -a, intercept: e.d };
            let rise = Line { slope: a, intercept: -e.d };
            let start = if k == 0 {
                f64::NEG_INFINITY
            } else {
                (entries[k - 1].d + e.d) / (2.0 * a)
            };
            seq.push((start, fall));
            seq.push((e.d / a, rise));
        }
        let first = seq.iter().rposition(|(s, _)| *s <= lo).unwrap_or(0);
        let mut out = Piecewise {
            starts: Vec::new(),
            lines: Vec::new(),
        };
        out.push(lo, seq[first].1);
        for &(s, line) in &seq[first + 1..] {
            if s >= hi {
                break;
            }
            out.push(s, line);
        }
        out
    }

    fn end_of(&self, k: usize, hi: f64) -> f64 {
        self.starts.get(k + 1).copied().unwrap_or(hi)
    }

    /// Pointwise minimum.
    fn min(&self, g: &Piecewise, lo: f64, hi: f64) -> Piecewise {
        let mut out = Piecewise {
            starts: Vec::with_capacity(self.starts.len() + g.starts.len()),
            lines: Vec::with_capacity(self.starts.len() + g.starts.len()),
        };
        let (mut i, mut j) = (0, 0);
        let mut x = lo;
        loop {
            let fe = self.end_of(i, hi);
            let ge = g.end_of(j, hi);
            let y = fe.min(ge);
            let (lf, lg) = (self.lines[i], g.lines[j]);
            let dx = lf.at(x) - lg.at(x);
            let dy = lf.at(y) - lg.at(y);
            if dx <= 0.0 && dy <= 0.0 {
                out.push(x, lf);
            } else if dx >= 0.0 && dy >= 0.0 {
                out.push(x, lg);
            } else {
                let tc = lf.crossing(&lg).max(x).min(y);
                if dx < 0.0 {
                    out.push(x, lf);
                    out.push(tc, lg);
                } else {
                    out.push(x, lg);
                    out.push(tc, lf);
                }
            }
            if y >= hi {
                break;
            }
            x = y;
            if fe == y {
                i += 1;
            }
            if ge == y {
                j += 1;
            }
        }
        out
    }
}

fn envelope(rows: &[Piecewise], lo: f64, hi: f64) -> Piecewise {
    match rows.len() {
        1 => rows[0].clone(),
        n => {
            let (l, r) = rows.split_at(n / 2);
            envelope(l, lo, hi).min(&envelope(r, lo, hi), lo, hi)
        }
    }
}

/// Best t for the Case I coding gain, with the objective value in working
/// units and the number of envelope vertices examined.
fn maximin(table: &CaseOneTable) -> Result<(f64, f64, usize)> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let hi = 2.0.sqrt();
    let lo = -hi;
    let saws: Vec<Piecewise> = table
        .rows
        .iter()
        .map(|row| Piecewise::sawtooth(row.a, &row.entries, lo, hi))
        .collect();
    let env = envelope(&saws, lo, hi);
    let n = env.lines.len();
    let mut cands: Vec<(f64, f64)> = Vec::new();
    cands.push((lo, env.lines[0].at(lo)));
    cands.push((hi, env.lines[n - 1].at(hi)));
    for k in 1..n {
        let (l, r) = (env.lines[k - 1], env.lines[k]);
        if l.slope > 0.0 && r.slope < 0.0 {
            let t = l.crossing(&r);
            cands.push((t, l.at(t).min(r.at(t))));
        }
    }
    let examined = n + 1;
    let mut best = cands[0];
    for &c in &cands[1..] {
        let tol = 1e-12 * best.1.abs().max(c.1.abs());
        let better = if (c.1 - best.1).abs() <= tol {
            c.0.abs() < best.0.abs() || (c.0.abs() == best.0.abs() && c.0 > best.0)
        } else {
            c.1 > best.1
        };
        if better {
            best = c;
        }
    }
    Ok((best.0, best.1, examined))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    /// t = u − v.
    pub t: f64,
    /// Both square-root branches for t, principal (larger u) first.
    pub r_candidates: Vec<DesignCoefficient>,
    /// Maximized Case I coding gain, 2·f(t)².
    pub case1_gain: f64,
    /// A Case I tuple attaining the minimum at t.
    pub case1_witness: DifferenceTuple,
    pub breakpoints_examined: usize,
    /// Filled in by [`verify_step2`].
    pub case2_min: Option<f64>,
    pub case2_dominates: bool,
    pub report: Option<GainReport>,
}

impl OptimizationResult {
    pub fn principal(&self) -> DesignCoefficient {
        self.r_candidates[0]
    }

    /// Overall coding gain once Case II has been checked.
    pub fn overall_gain(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.gain)
    }
}

/// Maximizes the Case I coding gain over t ∈ [−√2, √2].
pub fn optimize_step1(c: &Constellation) -> Result<OptimizationResult> {
    let table = build_case1_table(c)?;
    optimize_step1_with(&table)
}

pub fn optimize_step1_with(table: &CaseOneTable) -> Result<OptimizationResult> {
    let (t, f, examined) = maximin(table)?;
    let s2 = table.scale * table.scale;
    let mut cands = Vec::with_capacity(2);
    for b in [Branch::Plus, Branch::Minus] {
        cands.push(DesignCoefficient::from_difference(t, b, Provenance::Maximin)?);
    }
    let witness = table.objective_working(t).1.witness;
    let fn_ = f * s2;
    Ok(OptimizationResult {
        t,
        r_candidates: cands,
        case1_gain: 2.0 * fn_ * fn_,
        case1_witness: witness,
        breakpoints_examined: examined,
        case2_min: None,
        case2_dominates: false,
        report: None,
    })
}

/// Computes the exact Case II minimum at the principal candidate and whether
/// it stays above the Case I gain.
pub fn verify_step2(c: &Constellation, mut result: OptimizationResult) -> Result<OptimizationResult> {
    let r = result.principal();
    let report = GainEngine::new(c, Method::Aggregated)?.coding_gain(&r);
    result.case2_min = Some(report.case2_min);
    result.case2_dominates = report.case2_min >= result.case1_gain;
    result.report = Some(report);
    Ok(result)
}

/// Best design coefficient and its coding gain. Integer grids take the
/// closed-form optimum; everything else runs the maximin search followed by
/// the Case II check.
pub fn optimize(c: &Constellation) -> Result<(DesignCoefficient, GainReport)> {
    if c.is_integer_grid() {
        let r = analytic_integer_optimum()[0];
        let report = GainEngine::new(c, Method::auto(c))?.coding_gain(&r);
        return Ok((r, report));
    }
    let res = verify_step2(c, optimize_step1(c)?)?;
    let r = res.principal();
    Ok((r, res.report.expect("step 2 fills the report")))
}
