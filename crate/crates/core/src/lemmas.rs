//! Divisibility facts behind the non-vanishing determinant on integer grids,
//! in checkable form.
//!
//! * If 2^(2k) | a²+b²+c²+d², then 2^(k−1) divides all four numbers and
//!   2^k divides either all of them or none.
//! * Euler's four-square identity.
//! * If a²+b²+c²+d² = e²+f²+g²+h² and 2^k divides it, then
//!   2^k | ae+bf+cg+dh + af−be+ch−dg.
//!
//! Together they give: in a Case I row with A = 2^k·m (m odd) every
//! attainable d̃₂ is a multiple of 2^k, so min |A t − d̃₂| = 2^k·min|m t − n|,
//! which is at most 1/2 for odd rows and equals 1/2 exactly at t = ±1/2.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;


use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::optimize::build_case1_table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divisibility {
    AllDivisible,
    NoneDivisible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourSquareWitness {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub k: u32,
    pub classification: Divisibility,
}

fn divides(p: i64, x: i64) -> bool {
    x % p == 0
}

/// The dichotomy check without the precondition test; `None` if it fails.
#[inline]
fn dichotomy(v: [i64; 4], k: u32) -> Option<Divisibility> {
    if k >= 1 {
        let low = 1i64 << (k - 1);
        if !v.iter().all(|&x| divides(low, x)) {
            return None;
        }
    }
    let p = 1i64 << k;
    match v.iter().filter(|&&x| divides(p, x)).count() {
        4 => Some(Divisibility::AllDivisible),
        0 => Some(Divisibility::NoneDivisible),
        _ => None,
    }
}

pub fn classify_four_square(a: i64, b: i64, c: i64, d: i64, k: u32) -> Result<FourSquareWitness> {
    let sum = a * a + b * b + c * c + d * d;
    if !divides(1i64 << (2 * k), sum) {
        return Err(Error::FourSquarePrecondition { sum, k });
    }
    let classification = dichotomy([a, b, c, d], k).ok_or(Error::DichotomyFailed(a, b, c, d, k))?;
    Ok(FourSquareWitness {
        a,
        b,
        c,
        d,
        k,
        classification,
    })
}

/// (t₁, t₂, t₃, t₄) with t₁²+t₂²+t₃²+t₄² = (a²+b²+c²+d²)(e²+f²+g²+h²).
pub fn euler_four_square(x: [i64; 4], y: [i64; 4]) -> [i64; 4] {
    let [a, b, c, d] = x;
    let [e, f, g, h] = y;
    [
        a * e + b * f + c * g + d * h,
        a * f - b * e + c * h - d * g,
        a * g - b * h - c * e + d * f,
        a * h + b * g - c * f - d * e,
    ]
}

fn norm4(x: [i64; 4]) -> i64 {
    x.iter().map(|v| v * v).sum()
}

/// Whether 2^k divides ae+bf+cg+dh + af−be+ch−dg, given equal norms that
/// 2^k divides. A `false` would contradict the lemma.
pub fn check_cross_term_divisibility(x: [i64; 4], y: [i64; 4], k: u32) -> Result<bool> {
    let s = norm4(x);
    if s != norm4(y) || !divides(1i64 << k, s) {
        return Err(Error::CrossTermPrecondition);
    }
    let t = euler_four_square(x, y);
    Ok(divides(1i64 << k, t[0] + t[1]))
}

/// min |m t − n| over odd m in [1, m_max] and integers n, with the smallest
/// m attaining it.
pub fn min_offset(t: f64, m_max: u64) -> (f64, u64, i64) {
    let mut best = (f64::INFINITY, 1, 0);
    let mut m = 1;
    while m <= m_max.max(1) {
        let x = m as f64 * t;
        let n = x.round();
        let v = (x - n).abs();
        if v < best.0 {
            best = (v, m, n as i64);
        }
        m += 2;
    }
    best
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub checked: u64,
    pub failures: u64,
}

impl SweepReport {
    pub fn merge(self, o: SweepReport) -> SweepReport {
        SweepReport {
            checked: self.checked + o.checked,
            failures: self.failures + o.failures,
        }
    }
}

/// Four-square dichotomy over every (a, b, c, d) with a in `lead` and the
/// others in [−bound, bound], for every k ≤ k_max whose precondition holds.
pub fn sweep_lemma2(lead: core::ops::RangeInclusive<i64>, bound: i64, k_max: u32) -> SweepReport {
    let mut rep = SweepReport::default();
    for a in lead {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    let sum = a * a + b * b + c * c + d * d;
                    let top = if sum == 0 {
                        k_max
                    } else {
                        (sum.trailing_zeros() / 2).min(k_max)
                    };
                    for k in 0..=top {
                        rep.checked += 1;
                        if dichotomy([a, b, c, d], k).is_none() {
                            rep.failures += 1;
                        }
                    }
                }
            }
        }
    }
    rep
}

/// Integer 4-tuples in [−bound, bound]⁴ grouped by a²+b²+c²+d².
#[derive(Clone, Debug)]
pub struct FourSquareTable {
    by_norm: BTreeMap<i64, Vec<[i64; 4]>>,
}

impl FourSquareTable {
    pub fn new(bound: i64) -> Self {
        let mut by_norm: BTreeMap<i64, Vec<[i64; 4]>> = BTreeMap::new();
        for a in -bound..=bound {
            for b in -bound..=bound {
                for c in -bound..=bound {
                    for d in -bound..=bound {
                        let x = [a, b, c, d];
                        by_norm.entry(norm4(x)).or_default().push(x);
                    }
                }
            }
        }
        FourSquareTable { by_norm }
    }

    pub fn with_norm(&self, s: i64) -> &[[i64; 4]] {
        self.by_norm.get(&s).map_or(&[], |v| v.as_slice())
    }

    pub fn norms(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_norm.keys().copied()
    }
}

/// Sorted non-negative representations e ≥ f ≥ g ≥ h ≥ 0 of every
/// S = e²+f²+g²+h² with all parts at most `bound`. Signs and order can be
/// applied afterwards to reach every representation in [−bound, bound]⁴.
#[derive(Clone, Debug)]
pub struct FourSquareReps {
    bound: i64,
    by_norm: Vec<Vec<[i64; 4]>>,
}

impl FourSquareReps {
    pub fn new(bound: i64) -> Self {
        let mut by_norm = alloc::vec![Vec::new(); (4 * bound * bound + 1) as usize];
        for e in 0..=bound {
            for f in 0..=e {
                for g in 0..=f {
                    for h in 0..=g {
                        by_norm[(e * e + f * f + g * g + h * h) as usize].push([e, f, g, h]);
                    }
                }
            }
        }
        FourSquareReps { bound, by_norm }
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn reps(&self, s: i64) -> &[[i64; 4]] {
        usize::try_from(s)
            .ok()
            .and_then(|i| self.by_norm.get(i))
            .map_or(&[], |v| v.as_slice())
    }
}

/// Cross-term divisibility for every equal-norm pair in the table and every
/// k ≤ k_max with 2^k dividing the norm; restricted to the given norms.
pub fn sweep_lemma3(table: &FourSquareTable, norms: &[i64], k_max: u32) -> SweepReport {
    let mut rep = SweepReport::default();
    for &s in norms {
        let group = table.with_norm(s);
        let top = if s == 0 { k_max } else { s.trailing_zeros().min(k_max) };
        for &x in group {
            for &y in group {
                let t = euler_four_square(x, y);
                let cross = t[0] + t[1];
                for k in 0..=top {
                    rep.checked += 1;
                    if !divides(1i64 << k, cross) {
                        rep.failures += 1;
                    }
                }
            }
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Report {
    pub rows: usize,
    /// Every row A = 2^k·m (m odd) has only multiples of 2^k as d̃₂.
    pub divisibility_ok: bool,
    /// Some row has odd A; the 1/2 bound needs one.
    pub has_odd_row: bool,
    /// Case I coding gain at t with the constellation scaled to minimum
    /// distance 1.
    pub case1_gain: f64,
    /// case1_gain ≤ 1/2.
    pub bound_holds: bool,
    /// case1_gain = 1/2 within 1e-12.
    pub equality: bool,
}

pub fn verify_lemma1_bound(c: &Constellation, t: f64) -> Result<Lemma1Report> {
    if !c.is_integer_grid() {
        return Err(Error::NotIntegerGrid(c.name().into()));
    }
    let table = build_case1_table(c)?;
    let mut divisibility_ok = true;
    let mut has_odd_row = false;
    for row in table.rows() {
        let a = row.a as i64;
        let p = 1i64 << a.trailing_zeros();
        has_odd_row |= p == 1;
        divisibility_ok &= row.entries.iter().all(|e| divides(p, e.d as i64));
    }
    let dmin = c.min_distance()? / table.scale();
    let f = table.objective_working(t).0;
    let gain = 2.0 * f * f / (dmin * dmin * dmin * dmin);
    Ok(Lemma1Report {
        rows: table.rows().len(),
        divisibility_ok,
        has_odd_row,
        case1_gain: gain,
        bound_holds: gain <= 0.5 + 1e-12,
        equality: (gain - 0.5).abs() <= 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_qam, Normalization};

    #[test]
    fn four_square_examples() {
        assert_eq!(classify_four_square(1, 1, 1, 1, 1).unwrap().classification, Divisibility::NoneDivisible);
        assert_eq!(classify_four_square(2, 2, 2, 2, 1).unwrap().classification, Divisibility::AllDivisible);
        assert_eq!(classify_four_square(6, 2, 2, 2, 2).unwrap().classification, Divisibility::NoneDivisible);
        assert!(matches!(classify_four_square(1, 0, 0, 0, 1), Err(Error::FourSquarePrecondition { .. })));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_four_square([1, 0, 0, 0], [3, -4, 5, 7]), [3, -4, 5, 7]);
        assert_eq!(euler_four_square([1, 1, 0, 0], [1, 1, 0, 0]), [2, 0, 0, 0]);
    }

    #[test]
    fn cross_term_examples() {
        assert!(check_cross_term_divisibility([1, 1, 1, 1], [1, 1, 1, 1], 2).unwrap());
        let t = euler_four_square([1, 1, 1, 1], [1, 1, 1, 1]);
        assert_eq!(t[0] + t[1], 4);
        assert!(check_cross_term_divisibility([2, 0, 0, 0], [0, 2, 0, 0], 2).unwrap());
        assert_eq!(check_cross_term_divisibility([1, 0, 0, 0], [1, 1, 0, 0], 0), Err(Error::CrossTermPrecondition));
    }

    #[test]
    fn min_offset_examples() {
        assert_eq!(min_offset(0.5, 99).0, 0.5);
        let (v, m, n) = min_offset(0.4, 7);
        assert!(v < 1e-12);
        assert_eq!((m, n), (5, 2));
        assert!(min_offset(0.3977, 99).0 < 0.5);
    }

    #[test]
    fn small_sweeps_pass() {
        let r = sweep_lemma2(-6..=6, 6, 3);
        assert_eq!(r.failures, 0);
        assert!(r.checked > 13u64.pow(4));
        let table = FourSquareTable::new(3);
        let norms: Vec<i64> = table.norms().collect();
        let r = sweep_lemma3(&table, &norms, 3);
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn reps_cover_norms() {
        let reps = FourSquareReps::new(8);
        assert_eq!(reps.reps(0), &[[0, 0, 0, 0]]);
        assert!(!reps.reps(7).is_empty());
        assert!(reps.reps(4).contains(&[2, 0, 0, 0]) && reps.reps(4).contains(&[1, 1, 1, 1]));
        for s in 0..=256 {
            for r in reps.reps(s) {
                assert_eq!(norm4(*r), s);
            }
        }
    }

    #[test]
    fn lemma1_on_qam() {
        let c = make_qam(4, Normalization::MinDistOne).unwrap();
        let r = verify_lemma1_bound(&c, 0.5).unwrap();
        assert!(r.divisibility_ok && r.has_odd_row && r.bound_holds && r.equality);
        let r = verify_lemma1_bound(&c, 1.0 / 3.0).unwrap();
        assert!(r.case1_gain < 0.5);
        let c = make_qam(16, Normalization::MinDistOne).unwrap();
        let r = verify_lemma1_bound(&c, 0.5).unwrap();
        assert!(r.divisibility_ok && r.equality);
        let c = crate::constellation::make_proposed8(Normalization::IntegerGrid).unwrap();
        let r = verify_lemma1_bound(&c, 0.5).unwrap();
        assert!(r.divisibility_ok && !r.has_odd_row && r.equality);
        let p = crate::constellation::make_psk(8, Normalization::MinDistOne).unwrap();
        assert!(matches!(verify_lemma1_bound(&p, 0.5), Err(Error::NotIntegerGrid(_))));
    }
}
