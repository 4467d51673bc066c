//! Exact coding gain: the minimum of |det(ΔX)|² over every non-zero
//! difference tuple.
//!
//! |det|² depends on a tuple only through A, B and d̃₂, and those split over
//! the two pairs (Δs₁, Δs₃) and (Δs₂, Δs₄): each pair (x, y) contributes
//! a = |x|², b = |y|² and e = Im(xy*) − Re(xy*), and A, B, d̃₂ are the sums
//! over the two pairs. The aggregated method groups pairs by (a, b); for a
//! fixed pair of groups |det|² is a convex parabola in d̃₂ with vertex at
//! t(A+B)/2, so only the attainable sum closest to the vertex matters and a
//! two-pointer scan over the sorted e lists finds it.
//!
//! Constellations on an integer grid are swept in grid units, where A, B and
//! d̃₂ are integers, and the result is rescaled by scale⁴.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;

use crate::code::{
    build_codeword, build_codeword_golden, classify, det_norm_sqr, Branch, Case,
    DesignCoefficient, DifferenceTuple, Provenance,
};
use crate::constellation::{self, Constellation, DifferenceSet, Normalization};
use crate::error::{Error, Result};
use crate::quant;

/// Largest |D|⁴ the exhaustive method accepts.
pub const EXHAUSTIVE_GUARD: u128 = 10_000_000_000;

/// Above this many points the aggregated method is the default.
pub const AUTO_EXHAUSTIVE_MAX_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Loop over all |D|⁴ tuples, determinant of the difference codeword.
    Exhaustive,
    /// Loop over pairs of (a, b) groups of pair triples.
    Aggregated,
}

impl Method {
    pub fn auto(c: &Constellation) -> Self {
        if c.len() > AUTO_EXHAUSTIVE_MAX_POINTS {
            Method::Aggregated
        } else {
            Method::Exhaustive
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Method::Exhaustive => "exhaustive",
            Method::Aggregated => "aggregated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exhaustive" => Some(Method::Exhaustive),
            "aggregated" => Some(Method::Aggregated),
            _ => None,
        }
    }
}

/// (|x|², |y|², xy*) for one pair (x, y) of differences, with the pair as
/// witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTriple {
    pub a: f64,
    pub b: f64,
    pub c: Complex64,
    pub x: Complex64,
    pub y: Complex64,
}

/// Distinct triples over D×D (1e-9 per component), zero triple included.
pub fn pair_triples(d: &DifferenceSet) -> Vec<PairTriple> {
    let mut map: BTreeMap<(i64, i64, i64, i64), PairTriple> = BTreeMap::new();
    for &x in d.values() {
        for &y in d.values() {
            let t = PairTriple {
                a: x.norm_sqr(),
                b: y.norm_sqr(),
                c: x * y.conj(),
                x,
                y,
            };
            let k = (quant::key(t.a), quant::key(t.b), quant::key(t.c.re), quant::key(t.c.im));
            map.entry(k).or_insert(t);
        }
    }
    map.into_values().collect()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Entry {
    pub e: f64,
    pub x: Complex64,
    pub y: Complex64,
}

#[derive(Clone, Debug)]
pub(crate) struct Group {
    pub a: f64,
    pub b: f64,
    /// Sorted by `e`, distinct `e`.
    pub entries: Vec<Entry>,
}

impl Group {
    fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

fn witness_key(x: Complex64, y: Complex64) -> (i64, i64) {
    (quant::angle_key(x), quant::angle_key(y))
}

/// Tie-break key: (|Δs₁|², |Δs₂|², |Δs₃|², |Δs₄|², angles).
fn tie_key(t: &DifferenceTuple) -> [i64; 8] {
    let d = &t.0;
    [
        quant::key(d[0].norm_sqr()),
        quant::key(d[1].norm_sqr()),
        quant::key(d[2].norm_sqr()),
        quant::key(d[3].norm_sqr()),
        quant::angle_key(d[0]),
        quant::angle_key(d[1]),
        quant::angle_key(d[2]),
        quant::angle_key(d[3]),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub value: f64,
    pub tuple: DifferenceTuple,
    pub case: Case,
    tie: [i64; 8],
}

impl Candidate {
    fn new(value: f64, tuple: DifferenceTuple, case: Case) -> Self {
        Candidate {
            value,
            tuple,
            case,
            tie: tie_key(&tuple),
        }
    }

    fn beats(&self, other: &Candidate) -> bool {
        self.value < other.value || (self.value == other.value && self.tie < other.tie)
    }
}

fn keep_better(slot: &mut Option<Candidate>, c: Candidate) {
    match slot {
        Some(cur) if !c.beats(cur) => {}
        _ => *slot = Some(c),
    }
}

/// Partial minimum over a range of sweep units. Merging is order-independent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Partial {
    pub case1: Option<Candidate>,
    pub case2: Option<Candidate>,
    pub bound_min: Option<f64>,
    pub bound_violations: u64,
    pub evaluated: u64,
}

impl Partial {
    pub fn merge(mut self, other: Partial) -> Partial {
        if let Some(c) = other.case1 {
            keep_better(&mut self.case1, c);
        }
        if let Some(c) = other.case2 {
            keep_better(&mut self.case2, c);
        }
        self.bound_min = match (self.bound_min, other.bound_min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.bound_violations += other.bound_violations;
        self.evaluated += other.evaluated;
        self
    }

    fn offer(&mut self, value: f64, case: Case, tuple: impl FnOnce() -> DifferenceTuple) {
        let slot = match case {
            Case::I => &mut self.case1,
            Case::II => &mut self.case2,
        };
        if let Some(cur) = slot {
            if value > cur.value {
                return;
            }
        }
        keep_better(slot, Candidate::new(value, tuple(), case));
    }

    fn offer_bound(&mut self, value: f64, bound: f64) {
        self.bound_min = Some(self.bound_min.map_or(bound, |b| b.min(bound)));
        if value < bound - 1e-12 * bound.max(1.0) {
            self.bound_violations += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainReport {
    pub r: DesignCoefficient,
    /// min |det(ΔX)|² over all non-zero tuples.
    pub gain: f64,
    pub argmin: DifferenceTuple,
    pub case_of_argmin: Case,
    /// +∞ when no Case I tuple exists.
    pub case1_min: f64,
    pub case2_min: f64,
    /// Minimum of (B−A)²(u+v)²/2 over Case II tuples.
    pub case2_bound_min: f64,
    /// Case II combinations whose |det|² fell below the bound (always 0).
    pub bound_violations: u64,
    pub method: Method,
    /// Swept in grid units with integer A, B, d̃₂.
    pub exact: bool,
    pub evaluated: u64,
}

impl GainReport {
    pub fn full_diversity(&self) -> bool {
        self.gain > 0.0
    }
}

/// Precomputed search structures for one constellation; reusable across
/// design coefficients.
#[derive(Clone, Debug)]
pub struct GainEngine {
    method: Method,
    exact: bool,
    /// Length factor from working units back to the constellation's units.
    scale: f64,
    diffs: Vec<Complex64>,
    groups: Vec<Group>,
}

impl GainEngine {
    pub fn new(c: &Constellation, method: Method) -> Result<Self> {
        let ds = c.difference_set()?;
        let (exact, scale, diffs): (bool, f64, Vec<Complex64>) = match ds.integer() {
            Some((s, ints)) => (
                true,
                s,
                ints.iter().map(|&(x, y)| Complex64::new(x as f64, y as f64)).collect(),
            ),
            None => (false, 1.0, ds.values().to_vec()),
        };
        let mut engine = GainEngine {
            method,
            exact,
            scale,
            diffs,
            groups: Vec::new(),
        };
        match method {
            Method::Exhaustive => {
                let n = engine.diffs.len() as u128;
                if n.pow(4) > EXHAUSTIVE_GUARD {
                    return Err(Error::TooLarge(n.pow(4), EXHAUSTIVE_GUARD));
                }
            }
            Method::Aggregated => engine.groups = engine.build_groups(),
        }
        Ok(engine)
    }

    pub(crate) fn build_groups(&self) -> Vec<Group> {
        type GroupMap = BTreeMap<(i64, i64), (f64, f64, BTreeMap<i64, Entry>)>;
        let mut map: GroupMap = BTreeMap::new();
        for &x in &self.diffs {
            for &y in &self.diffs {
                let (a, b) = (x.norm_sqr(), y.norm_sqr());
                let c = x * y.conj();
                let e = c.im - c.re;
                let (gk, ek) = if self.exact {
                    ((a as i64, b as i64), e as i64)
                } else {
                    ((quant::key(a), quant::key(b)), quant::key(e))
                };
                let slot = map.entry(gk).or_insert_with(|| (a, b, BTreeMap::new()));
                let entry = Entry { e, x, y };
                slot.2
                    .entry(ek)
                    .and_modify(|cur| {
                        if witness_key(x, y) < witness_key(cur.x, cur.y) {
                            *cur = entry;
                        }
                    })
                    .or_insert(entry);
            }
        }
        map.into_values()
            .map(|(a, b, entries)| Group {
                a,
                b,
                entries: entries.into_values().collect(),
            })
            .collect()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Grid scale for exact engines, 1 otherwise.
    pub fn working_scale(&self) -> f64 {
        self.scale
    }

    pub fn difference_count(&self) -> usize {
        self.diffs.len()
    }

    /// Number of independent sweep units; [`sweep`](Self::sweep) takes any
    /// sub-range.
    pub fn units(&self) -> usize {
        match self.method {
            Method::Exhaustive => self.diffs.len(),
            Method::Aggregated => self.groups.len(),
        }
    }

    pub fn sweep(&self, r: &DesignCoefficient, units: Range<usize>) -> Partial {
        match self.method {
            Method::Exhaustive => self.sweep_exhaustive(r, units),
            Method::Aggregated => self.sweep_aggregated(r, units),
        }
    }

    fn sweep_exhaustive(&self, r: &DesignCoefficient, units: Range<usize>) -> Partial {
        let mut p = Partial::default();
        let s = r.u() + r.v();
        let d = &self.diffs;
        for &d1 in &d[units] {
            for &d2 in d {
                let a = d1.norm_sqr() + d2.norm_sqr();
                for &d3 in d {
                    for &d4 in d {
                        if a == 0.0 && d3.norm_sqr() == 0.0 && d4.norm_sqr() == 0.0 {
                            continue;
                        }
                        let b = d3.norm_sqr() + d4.norm_sqr();
                        let tuple = [d1, d2, d3, d4];
                        let value = build_codeword(tuple, r).det().norm_sqr();
                        let case = classify(a, b);
                        p.evaluated += 1;
                        if case == Case::II {
                            p.offer_bound(value, (b - a) * (b - a) * s * s / 2.0);
                        }
                        p.offer(value, case, || DifferenceTuple(tuple));
                    }
                }
            }
        }
        p
    }

    fn sweep_aggregated(&self, r: &DesignCoefficient, units: Range<usize>) -> Partial {
        let mut p = Partial::default();
        let (u, v) = (r.u(), r.v());
        let t = u - v;
        let s = u + v;
        for i in units {
            let gi = &self.groups[i];
            for gj in &self.groups[i..] {
                if gi.is_zero() && gj.is_zero() {
                    continue;
                }
                let a = gi.a + gj.a;
                let b = gi.b + gj.b;
                let case = classify(a, b);
                let target = t * (a + b) / 2.0;
                let (ei, ej) = closest_sum(&gi.entries, &gj.entries, target);
                let (x, y) = (&gi.entries[ei], &gj.entries[ej]);
                let value = det_norm_sqr(a, b, x.e + y.e, u, v, case);
                p.evaluated += 1;
                if case == Case::II {
                    p.offer_bound(value, (b - a) * (b - a) * s * s / 2.0);
                }
                p.offer(value, case, || {
                    let fwd = DifferenceTuple([x.x, y.x, x.y, y.y]);
                    let rev = DifferenceTuple([y.x, x.x, y.y, x.y]);
                    if tie_key(&rev) < tie_key(&fwd) {
                        rev
                    } else {
                        fwd
                    }
                });
            }
        }
        p
    }

    pub fn report(&self, r: &DesignCoefficient, p: Partial) -> GainReport {
        let s2 = self.scale * self.scale;
        let s4 = s2 * s2;
        let best = match (&p.case1, &p.case2) {
            (Some(a), Some(b)) => {
                if b.beats(a) {
                    *b
                } else {
                    *a
                }
            }
            (Some(a), None) => *a,
            (None, Some(b)) => *b,
            (None, None) => unreachable!("a constellation with two points has a non-zero tuple"),
        };
        let scaled = |c: &Option<Candidate>| c.map_or(f64::INFINITY, |c| c.value * s4);
        GainReport {
            r: *r,
            gain: best.value * s4,
            argmin: best.tuple.scaled(self.scale),
            case_of_argmin: best.case,
            case1_min: scaled(&p.case1),
            case2_min: scaled(&p.case2),
            case2_bound_min: p.bound_min.map_or(f64::INFINITY, |b| b * s4),
            bound_violations: p.bound_violations,
            method: self.method,
            exact: self.exact,
            evaluated: p.evaluated,
        }
    }

    pub fn coding_gain(&self, r: &DesignCoefficient) -> GainReport {
        let p = self.sweep(r, 0..self.units());
        self.report(r, p)
    }
}

/// Indices (i, j) minimizing |xs[i].e + ys[j].e − target|; both lists sorted.
fn closest_sum(xs: &[Entry], ys: &[Entry], target: f64) -> (usize, usize) {
    let mut i = 0usize;
    let mut j = ys.len() - 1;
    let mut best = (0, j);
    let mut best_gap = f64::INFINITY;
    loop {
        let s = xs[i].e + ys[j].e;
        let gap = (s - target).abs();
        if gap < best_gap {
            best_gap = gap;
            best = (i, j);
        }
        if s < target {
            i += 1;
            if i == xs.len() {
                break;
            }
        } else {
            if j == 0 {
                break;
            }
            j -= 1;
        }
    }
    best
}

pub fn coding_gain(c: &Constellation, r: &DesignCoefficient, method: Method) -> Result<GainReport> {
    Ok(GainEngine::new(c, method)?.coding_gain(r))
}

/// Coding gain of the constellation scaled by `alpha`; equals α⁴ times the
/// unscaled gain.
pub fn coding_gain_scaled(c: &Constellation, r: &DesignCoefficient, alpha: f64) -> Result<GainReport> {
    let scaled = c.scaled(alpha);
    coding_gain(&scaled, r, Method::auto(c))
}

/// Coding gain of the Golden code, by exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenReport {
    pub gain: f64,
    pub argmin: DifferenceTuple,
    pub evaluated: u64,
}

pub fn golden_coding_gain(c: &Constellation) -> Result<GoldenReport> {
    let ds = c.difference_set()?;
    let d = ds.values();
    let n = d.len() as u128;
    if n.pow(4) > EXHAUSTIVE_GUARD {
        return Err(Error::TooLarge(n.pow(4), EXHAUSTIVE_GUARD));
    }
    let mut best = Candidate::new(f64::INFINITY, DifferenceTuple([Complex64::new(0.0, 0.0); 4]), Case::II);
    let mut evaluated = 0u64;
    for &d1 in d {
        for &d2 in d {
            for &d3 in d {
                for &d4 in d {
                    let tuple = [d1, d2, d3, d4];
                    if tuple.iter().all(|z| z.norm_sqr() == 0.0) {
                        continue;
                    }
                    evaluated += 1;
                    let value = build_codeword_golden(tuple).det().norm_sqr();
                    if value <= best.value {
                        let c = Candidate::new(value, DifferenceTuple(tuple), Case::II);
                        if c.beats(&best) {
                            best = c;
                        }
                    }
                }
            }
        }
    }
    Ok(GoldenReport {
        gain: best.value,
        argmin: best.tuple,
        evaluated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Qam,
    Psk,
    /// Sizes 8 and 16 map to the two square-grid APSK presets.
    GridApsk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RPolicy {
    /// Principal integer-grid optimum (u − v = 1/2).
    Analytic,
    /// Run the optimizer separately for every size.
    Reoptimize,
}

/// Coding gain at minimum distance 1 for each size of a family.
pub fn vanishing_probe(family: Family, sizes: &[usize], policy: RPolicy) -> Result<Vec<(usize, f64)>> {
    if sizes.len() < 2 {
        return Err(Error::TooFewSizes);
    }
    let norm = Normalization::MinDistOne;
    let mut out = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let c = match family {
            Family::Qam => constellation::make_qam(m, norm)?,
            Family::Psk => constellation::make_psk(m, norm)?,
            Family::GridApsk => match m {
                8 => constellation::make_proposed8(norm)?,
                16 => constellation::make_proposed16(norm)?,
                _ => return Err(Error::UnsupportedQamSize(m)),
            },
        };
        let gain = match policy {
            RPolicy::Analytic => {
                let r = DesignCoefficient::from_difference(0.5, Branch::Plus, Provenance::AnalyticTheorem1)?;
                coding_gain(&c, &r, Method::auto(&c))?.gain
            }
            RPolicy::Reoptimize => crate::optimize::optimize(&c)?.1.gain,
        };
        out.push((m, gain));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_proposed8, make_psk, make_qam};

    fn analytic_r() -> DesignCoefficient {
        DesignCoefficient::from_difference(0.5, Branch::Plus, Provenance::AnalyticTheorem1).unwrap()
    }

    #[test]
    fn triples_of_small_set() {
        let c = Constellation::new("bpsk", alloc::vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)]).unwrap();
        let d = c.difference_set().unwrap();
        assert_eq!(d.len(), 3);
        let t = pair_triples(&d);
        let mut got: Vec<(i64, i64, i64)> = t.iter().map(|t| (t.a as i64, t.b as i64, t.c.re as i64)).collect();
        got.sort();
        assert_eq!(got, alloc::vec![(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, -1), (1, 1, 1)]);
        assert!(t.len() <= d.len() * d.len());
    }

    #[test]
    fn qam4_min_dist_one_is_half() {
        let c = make_qam(4, Normalization::MinDistOne).unwrap();
        for m in [Method::Exhaustive, Method::Aggregated] {
            let rep = coding_gain(&c, &analytic_r(), m).unwrap();
            assert!((rep.gain - 0.5).abs() < 1e-12, "{m:?} {}", rep.gain);
            assert_eq!(rep.case_of_argmin, Case::I);
            assert!(rep.case2_min >= 7.0 / 8.0 - 1e-12);
            assert_eq!(rep.bound_violations, 0);
        }
        let agg = coding_gain(&c, &analytic_r(), Method::Aggregated).unwrap();
        assert_eq!(agg.gain, 0.5);
    }

    #[test]
    fn closest_sum_finds_best_pair() {
        let mk = |v: &[f64]| v.iter().map(|&e| Entry { e, x: Complex64::new(0.0, 0.0), y: Complex64::new(0.0, 0.0) }).collect::<Vec<_>>();
        let xs = mk(&[-3.0, -1.0, 2.0, 7.0]);
        let ys = mk(&[-4.0, 0.5, 1.0]);
        for target in [-10.0, -2.2, 0.0, 1.4, 3.1, 100.0] {
            let (i, j) = closest_sum(&xs, &ys, target);
            let got = (xs[i].e + ys[j].e - target).abs();
            let brute = xs.iter().flat_map(|x| ys.iter().map(move |y| (x.e + y.e - target).abs())).fold(f64::INFINITY, f64::min);
            assert_eq!(got, brute, "target {target}");
        }
    }

    #[test]
    fn psk8_methods_agree() {
        let c = make_psk(8, Normalization::UnitAveragePower).unwrap();
        let r = DesignCoefficient::user(0.8, 0.6).unwrap();
        let a = coding_gain(&c, &r, Method::Aggregated).unwrap();
        let e = coding_gain(&c, &r, Method::Exhaustive).unwrap();
        assert!((a.gain - e.gain).abs() < 1e-9, "{} {}", a.gain, e.gain);
        assert!((a.case1_min - e.case1_min).abs() < 1e-9);
        assert!((a.case2_min - e.case2_min).abs() < 1e-9);
        assert!((a.case2_bound_min - e.case2_bound_min).abs() < 1e-9);
    }

    #[test]
    fn partitioned_sweep_is_deterministic() {
        let c = make_proposed8(Normalization::UnitAveragePower).unwrap();
        let r = DesignCoefficient::user(0.3, 0.9).unwrap();
        for m in [Method::Exhaustive, Method::Aggregated] {
            let eng = GainEngine::new(&c, m).unwrap();
            let whole = eng.coding_gain(&r);
            let n = eng.units();
            let mut parts = Vec::new();
            let mut lo = 0;
            while lo < n {
                let hi = (lo + 3).min(n);
                parts.push(eng.sweep(&r, lo..hi));
                lo = hi;
            }
            parts.reverse();
            let merged = parts.into_iter().fold(Partial::default(), Partial::merge);
            assert_eq!(eng.report(&r, merged), whole);
        }
    }

    #[test]
    fn degenerate_coefficient_has_zero_gain() {
        let c = make_qam(4, Normalization::UnitAveragePower).unwrap();
        let r = DesignCoefficient::user(1.0, 1.0).unwrap();
        let rep = coding_gain(&c, &r, Method::Exhaustive).unwrap();
        assert!(rep.gain < 1e-24);
        assert!(!coding_gain(&c, &r, Method::Aggregated).unwrap().full_diversity());
    }

    #[test]
    fn guard_rejects_large_exhaustive() {
        let c = make_qam(64, Normalization::MinDistOne).unwrap();
        // 225⁴ fits under the guard, so build a bigger set: 16-APSK at 241 diffs is
        // also under it; a 256-point random-ish set is not.
        let pts = (0..400)
            .map(|k| Complex64::new((k % 20) as f64 + 0.001 * k as f64, (k / 20) as f64))
            .collect();
        let big = Constellation::new("big", pts).unwrap();
        assert!(matches!(GainEngine::new(&big, Method::Exhaustive), Err(Error::TooLarge(..))));
        assert!(GainEngine::new(&c, Method::Aggregated).is_ok());
    }
}
