//! Drivers for the number-theory checks: exhaustive sweeps split by leading
//! coordinate across threads, plus seeded random sampling.

use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stbc_core::constellation::{make_proposed16, make_proposed8, make_qam};
use stbc_core::lemmas::{
    check_cross_term_divisibility, euler_four_square, sweep_lemma2, sweep_lemma3, verify_lemma1_bound,
    FourSquareReps, FourSquareTable, SweepReport,
};
use stbc_core::Normalization;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Small,
    Full,
}

impl Level {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "small" => Some(Level::Small),
            "full" => Some(Level::Full),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub name: &'static str,
    pub scope: String,
    pub report: SweepReport,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.failures == 0 && self.report.checked > 0
    }
}

pub fn lemma2(bound: i64, k_max: u32) -> SweepReport {
    (-bound..=bound)
        .into_par_iter()
        .map(|a| sweep_lemma2(a..=a, bound, k_max))
        .reduce(SweepReport::default, SweepReport::merge)
}

pub fn lemma3(bound: i64, k_max: u32) -> SweepReport {
    let table = FourSquareTable::new(bound);
    let norms: Vec<i64> = table.norms().collect();
    norms
        .par_iter()
        .map(|&s| sweep_lemma3(&table, &[s], k_max))
        .reduce(SweepReport::default, SweepReport::merge)
}

pub fn euler_random(samples: u64, bound: i64, seed: u64) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SweepReport::default();
    let norm = |v: [i64; 4]| v.iter().map(|a| (*a as i128) * (*a as i128)).sum::<i128>();
    for _ in 0..samples {
        let x: [i64; 4] = std::array::from_fn(|_| rng.random_range(-bound..=bound));
        let y: [i64; 4] = std::array::from_fn(|_| rng.random_range(-bound..=bound));
        rep.checked += 1;
        if norm(euler_four_square(x, y)) != norm(x) * norm(y) {
            rep.failures += 1;
        }
    }
    rep
}

/// Equal-norm pairs: x is drawn in [−bound, bound]⁴ (multiplied by a random
/// power of two so high 2-adic valuations appear), y is a random signed,
/// permuted representation of the same norm. Each pair is checked at the
/// largest k with 2^k dividing the norm.
pub fn lemma3_random(samples: u64, reps: &FourSquareReps, seed: u64) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = reps.bound();
    let mut rep = SweepReport::default();
    for _ in 0..samples {
        let shift = rng.random_range(0..=3u32);
        let b = bound >> shift;
        let x: [i64; 4] = std::array::from_fn(|_| rng.random_range(-b..=b) << shift);
        let s: i64 = x.iter().map(|a| a * a).sum();
        let choices = reps.reps(s);
        let mut y = choices[rng.random_range(0..choices.len())];
        y.shuffle(&mut rng);
        for v in &mut y {
            if rng.random::<bool>() {
                *v = -*v;
            }
        }
        let k = if s == 0 { 0 } else { s.trailing_zeros() };
        rep.checked += 1;
        if !matches!(check_cross_term_divisibility(x, y, k), Ok(true)) {
            rep.failures += 1;
        }
    }
    rep
}

/// Row divisibility and the 1/2 bound (with equality at t = 1/2) on the
/// integer-grid constellations.
pub fn lemma1() -> crate::Result<SweepReport> {
    let norm = Normalization::IntegerGrid;
    let mut rep = SweepReport::default();
    for c in [make_qam(4, norm)?, make_qam(16, norm)?, make_qam(64, norm)?, make_proposed8(norm)?, make_proposed16(norm)?] {
        for (t, equal) in [(0.5, true), (-0.5, true), (0.3, false), (0.45, false)] {
            let r = verify_lemma1_bound(&c, t)?;
            rep.checked += 1;
            let ok = r.divisibility_ok && r.bound_holds && (r.equality == equal);
            if !ok {
                rep.failures += 1;
            }
        }
    }
    Ok(rep)
}

pub fn run(level: Level, seed: u64) -> crate::Result<Vec<Outcome>> {
    let (b2, b3, euler_n, random_n) = match level {
        Level::Small => (16, 4, 10_000, 10_000),
        Level::Full => (64, 8, 10_000, 100_000),
    };
    let reps = FourSquareReps::new(64);
    Ok(vec![
        Outcome {
            name: "four-square-dichotomy",
            scope: format!("|a..d|<={b2}, k<=5"),
            report: lemma2(b2, 5),
        },
        Outcome {
            name: "euler-identity",
            scope: format!("{euler_n} random, |x|<=10000"),
            report: euler_random(euler_n, 10_000, seed),
        },
        Outcome {
            name: "cross-term-divisibility",
            scope: format!("|x|<={b3}, k<=4"),
            report: lemma3(b3, 4),
        },
        Outcome {
            name: "cross-term-divisibility-random",
            scope: format!("{random_n} random equal-norm pairs, |x|<=64"),
            report: lemma3_random(random_n, &reps, seed.wrapping_add(1)),
        },
        Outcome {
            name: "case1-half-bound",
            scope: "integer-grid presets".into(),
            report: lemma1()?,
        },
    ])
}
