//! Signal constellations: rectangular QAM, M-PSK, conventional APSK and the
//! square-grid APSK whose ring radii are of the form √(m²+n²).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quant::{self, TOL};

/// How a constellation is scaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Grid spacing 1 (only for constellations on a square grid).
    IntegerGrid,
    /// Mean of |p|² equal to 1.
    UnitAveragePower,
    /// Minimum pairwise distance equal to 1.
    MinDistOne,
}

impl Normalization {
    pub fn id(self) -> &'static str {
        match self {
            Normalization::IntegerGrid => "integer-grid",
            Normalization::UnitAveragePower => "unit-power",
            Normalization::MinDistOne => "min-dist-1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "integer-grid" | "grid" => Some(Normalization::IntegerGrid),
            "unit-power" | "unit-average-power" | "unit" => Some(Normalization::UnitAveragePower),
            "min-dist-1" | "min-dist" | "mindist1" => Some(Normalization::MinDistOne),
            _ => None,
        }
    }
}

/// Points lie on `offset + scale·(x + jy)` for integers x, y.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub scale: f64,
    pub offset: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    /// Index `ix * side + iy` sits at grid coordinate (ix, iy).
    SquareQam { side: usize },
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    normalization: Normalization,
    grid: Option<Grid>,
    ring_radii: Vec<f64>,
    layout: Layout,
}

fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

fn check_distinct(points: &[Complex64]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() <= TOL {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    Ok(())
}

impl Constellation {
    /// Builds a constellation in its natural units. Labels default to the
    /// Gray code of the point index.
    pub fn new(name: impl Into<String>, points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyConstellation);
        }
        check_distinct(&points)?;
        let labels = (0..points.len() as u32).map(gray).collect();
        Ok(Constellation {
            name: name.into(),
            points,
            labels,
            normalization: Normalization::IntegerGrid,
            grid: None,
            ring_radii: Vec::new(),
            layout: Layout::General,
        })
    }

    fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = Some(grid);
        self
    }

    fn with_rings(mut self, mut radii: Vec<f64>) -> Self {
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        self.ring_radii = radii;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Bits carried per symbol, when the size is a power of two.
    pub fn bits_per_symbol(&self) -> Option<u32> {
        let m = self.points.len();
        if m >= 2 && m.is_power_of_two() {
            Some(m.trailing_zeros())
        } else {
            None
        }
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn grid(&self) -> Option<Grid> {
        self.grid
    }

    pub fn is_integer_grid(&self) -> bool {
        self.grid.is_some()
    }

    pub fn ring_radii(&self) -> &[f64] {
        &self.ring_radii
    }

    pub fn avg_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    pub fn min_distance(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::SingletonConstellation);
        }
        let mut best = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.min((p - q).norm());
            }
        }
        Ok(best)
    }

    pub fn papr(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::SingletonConstellation);
        }
        let peak = self.points.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max);
        Ok(peak / self.avg_power())
    }

    /// Uniformly scaled copy. A factor within 1e-12 of one is skipped so
    /// normalizing twice yields identical points.
    pub fn normalize(&self, mode: Normalization) -> Result<Self> {
        let factor = match mode {
            Normalization::UnitAveragePower => 1.0 / self.avg_power().sqrt(),
            Normalization::MinDistOne => 1.0 / self.min_distance()?,
            Normalization::IntegerGrid => match self.grid {
                Some(g) => 1.0 / g.scale,
                None => return Err(Error::NotIntegerGrid(self.name.clone())),
            },
        };
        let mut out = if (factor - 1.0).abs() <= 1e-12 {
            self.clone()
        } else {
            self.scaled(factor)
        };
        out.normalization = mode;
        Ok(out)
    }

    /// Copy with every point multiplied by `alpha`; metadata follows.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            *p *= alpha;
        }
        if let Some(g) = &mut out.grid {
            g.scale *= alpha;
            g.offset *= alpha;
        }
        for r in &mut out.ring_radii {
            *r *= alpha;
        }
        out
    }

    /// Index of the closest point, lowest index on ties.
    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Same decision as [`nearest`](Self::nearest); square QAM rounds each
    /// axis instead of scanning.
    pub fn nearest_fast(&self, z: Complex64) -> usize {
        match (self.layout, self.grid) {
            (Layout::SquareQam { side }, Some(g)) => {
                let w = (z - g.offset) / g.scale;
                // float-to-int casts saturate, so negatives land on 0
                let clamp = |x: f64| -> usize { ((x + 0.5) as usize).min(side - 1) };
                clamp(w.re) * side + clamp(w.im)
            }
            _ => self.nearest(z),
        }
    }

    /// Grid coordinates of every point, if the constellation is on a grid.
    pub fn grid_coordinates(&self) -> Option<Vec<(i64, i64)>> {
        let g = self.grid?;
        Some(
            self.points
                .iter()
                .map(|p| {
                    let w = (p - g.offset) / g.scale;
                    (w.re.round() as i64, w.im.round() as i64)
                })
                .collect(),
        )
    }

    pub fn difference_set(&self) -> Result<DifferenceSet> {
        difference_set(self)
    }
}

/// All distinct differences p − q over ordered point pairs, 0 included.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceSet {
    values: Vec<Complex64>,
    integer: Option<(f64, Vec<(i64, i64)>)>,
}

impl DifferenceSet {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid scale and the differences in grid units, aligned with `values`.
    pub fn integer(&self) -> Option<(f64, &[(i64, i64)])> {
        self.integer.as_ref().map(|(s, v)| (*s, v.as_slice()))
    }
}

pub fn difference_set(c: &Constellation) -> Result<DifferenceSet> {
    if c.len() < 2 {
        return Err(Error::SingletonConstellation);
    }
    let pts = c.points();
    if let (Some(g), Some(coords)) = (c.grid, c.grid_coordinates()) {
        let mut set: BTreeMap<(i64, i64), ()> = BTreeMap::new();
        for &(x1, y1) in &coords {
            for &(x2, y2) in &coords {
                set.insert((x1 - x2, y1 - y2), ());
            }
        }
        let ints: Vec<(i64, i64)> = set.into_keys().collect();
        let values = ints
            .iter()
            .map(|&(x, y)| Complex64::new(x as f64, y as f64) * g.scale)
            .collect();
        return Ok(DifferenceSet {
            values,
            integer: Some((g.scale, ints)),
        });
    }
    let mut set: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    set.insert((0, 0), Complex64::new(0.0, 0.0));
    for p in pts {
        for q in pts {
            let d = p - q;
            set.entry(quant::ckey(d)).or_insert(d);
        }
    }
    Ok(DifferenceSet {
        values: set.into_values().collect(),
        integer: None,
    })
}

pub fn min_distance(c: &Constellation) -> Result<f64> {
    c.min_distance()
}

pub fn papr(c: &Constellation) -> Result<f64> {
    c.papr()
}

pub fn normalize(c: &Constellation, mode: Normalization) -> Result<Constellation> {
    c.normalize(mode)
}

/// Square M-QAM, M ∈ {4, 16, 64}, per-axis levels centered on zero.
pub fn make_qam(m: usize, norm: Normalization) -> Result<Constellation> {
    let side = match m {
        4 => 2,
        16 => 4,
        64 => 8,
        _ => return Err(Error::UnsupportedQamSize(m)),
    };
    let half = (side as f64 - 1.0) / 2.0;
    let bits = (side as u32).trailing_zeros();
    let mut points = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for ix in 0..side {
        for iy in 0..side {
            points.push(Complex64::new(ix as f64 - half, iy as f64 - half));
            labels.push((gray(ix as u32) << bits) | gray(iy as u32));
        }
    }
    let mut c = Constellation::new(format!("{m}-QAM"), points)?.with_grid(Grid {
        scale: 1.0,
        offset: Complex64::new(-half, -half),
    });
    c.labels = labels;
    c.layout = Layout::SquareQam { side };
    c.normalize(norm)
}

fn unit_phasor(k: usize, m: usize) -> Complex64 {
    // exact values on the axes
    if (4 * k) % m == 0 {
        return match (4 * k / m) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let a = 2.0 * PI * k as f64 / m as f64;
    Complex64::new(a.cos(), a.sin())
}

/// M-PSK with points e^{j2πk/M}.
pub fn make_psk(m: usize, norm: Normalization) -> Result<Constellation> {
    if m < 2 {
        return Err(Error::PskTooSmall(m));
    }
    let points = (0..m).map(|k| unit_phasor(k, m)).collect();
    let mut c = Constellation::new(format!("{m}-PSK"), points)?.with_rings(alloc::vec![1.0]);
    if m == 2 || m == 4 {
        c = c.with_grid(Grid {
            scale: 1.0,
            offset: Complex64::new(0.0, 0.0),
        });
    }
    c.normalize(norm)
}

/// Four inner points at (±b, ±b) and four outer points on the axes at
/// radius b(1+√3), b = 1/√(3+√3) for unit power.
pub fn make_apsk8_conventional(norm: Normalization) -> Result<Constellation> {
    let s3 = 3.0.sqrt();
    let b = 1.0 / (3.0 + s3).sqrt();
    let outer = b * (1.0 + s3);
    let mut points = Vec::with_capacity(8);
    for k in 0..4 {
        let a = PI / 4.0 + k as f64 * PI / 2.0;
        points.push(Complex64::new(b * a.cos().signum(), b * a.sin().signum()));
    }
    for k in 0..4 {
        points.push(unit_phasor(k, 4) * outer);
    }
    let inner = b * 2.0.sqrt();
    Constellation::new("8-APSK", points)?
        .with_rings(alloc::vec![inner, outer])
        .normalize(norm)
}

/// DVB-S2 style 4+12 APSK with the ring radii r₁ = 2/√(13+6√3) and
/// r₂ = 2√2/√(8−√3).
pub fn make_apsk16_dvbs2(norm: Normalization) -> Result<Constellation> {
    let s3 = 3.0.sqrt();
    let r1 = 2.0 / (13.0 + 6.0 * s3).sqrt();
    let r2 = 2.0 * 2.0.sqrt() / (8.0 - s3).sqrt();
    let mut points = Vec::with_capacity(16);
    for k in 0..4 {
        let a = PI / 4.0 + k as f64 * PI / 2.0;
        points.push(Complex64::new(a.cos(), a.sin()) * r1);
    }
    for k in 0..12 {
        let a = PI / 12.0 + k as f64 * PI / 6.0;
        points.push(Complex64::new(a.cos(), a.sin()) * r2);
    }
    Constellation::new("16-APSK", points)?
        .with_rings(alloc::vec![r1, r2])
        .normalize(norm)
}

/// One ring of a square-grid APSK: radius √(m²+n²) in grid units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridRing {
    pub m: i64,
    pub n: i64,
    pub points: Vec<(i64, i64)>,
}

impl GridRing {
    pub fn radius_sq(&self) -> i64 {
        self.m * self.m + self.n * self.n
    }
}

/// Ring descriptors and integer points of a square-grid APSK.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridApskSpec {
    rings: Vec<GridRing>,
}

impl GridApskSpec {
    pub fn new(rings: Vec<GridRing>) -> Result<Self> {
        for ring in &rings {
            for &(x, y) in &ring.points {
                if x * x + y * y != ring.radius_sq() {
                    return Err(Error::PointOffRing {
                        x,
                        y,
                        m: ring.m,
                        n: ring.n,
                    });
                }
            }
        }
        Ok(GridApskSpec { rings })
    }

    pub fn rings(&self) -> &[GridRing] {
        &self.rings
    }

    /// (±1,±1) on ring √2 and the axis points (±2,0), (0,±2) on ring 2.
    pub fn proposed8() -> Self {
        GridApskSpec::new(alloc::vec![
            GridRing {
                m: 1,
                n: 1,
                points: alloc::vec![(1, 1), (-1, 1), (-1, -1), (1, -1)],
            },
            GridRing {
                m: 2,
                n: 0,
                points: alloc::vec![(2, 0), (0, 2), (-2, 0), (0, -2)],
            },
        ])
        .expect("preset rings are consistent")
    }

    /// Rings 1, √2, 2 and 3 with four points each.
    pub fn proposed16() -> Self {
        GridApskSpec::new(alloc::vec![
            GridRing {
                m: 1,
                n: 0,
                points: alloc::vec![(1, 0), (0, 1), (-1, 0), (0, -1)],
            },
            GridRing {
                m: 1,
                n: 1,
                points: alloc::vec![(1, 1), (-1, 1), (-1, -1), (1, -1)],
            },
            GridRing {
                m: 2,
                n: 0,
                points: alloc::vec![(2, 0), (0, 2), (-2, 0), (0, -2)],
            },
            GridRing {
                m: 3,
                n: 0,
                points: alloc::vec![(3, 0), (0, 3), (-3, 0), (0, -3)],
            },
        ])
        .expect("preset rings are consistent")
    }
}

pub fn make_apsk_grid(
    name: &str,
    spec: &GridApskSpec,
    norm: Normalization,
) -> Result<Constellation> {
    let mut points = Vec::new();
    let mut radii = Vec::new();
    for ring in spec.rings() {
        radii.push((ring.radius_sq() as f64).sqrt());
        for &(x, y) in &ring.points {
            points.push(Complex64::new(x as f64, y as f64));
        }
    }
    match points.len() {
        0 => return Err(Error::EmptyConstellation),
        1 => return Err(Error::SingletonConstellation),
        _ => {}
    }
    Constellation::new(name.to_string(), points)?
        .with_grid(Grid {
            scale: 1.0,
            offset: Complex64::new(0.0, 0.0),
        })
        .with_rings(radii)
        .normalize(norm)
}

pub fn make_proposed8(norm: Normalization) -> Result<Constellation> {
    make_apsk_grid("Proposed 8-APSK", &GridApskSpec::proposed8(), norm)
}

pub fn make_proposed16(norm: Normalization) -> Result<Constellation> {
    make_apsk_grid("Proposed 16-APSK", &GridApskSpec::proposed16(), norm)
}

/// Identifiers accepted by [`by_id`].
pub const KNOWN_IDS: &[&str] = &[
    "qam4",
    "qam16",
    "qam64",
    "psk<M>",
    "apsk8",
    "apsk16",
    "proposed-8",
    "proposed-16",
];

/// Looks up a constellation by short identifier (`qam16`, `psk8`, `apsk8`,
/// `apsk16`, `proposed-8`, ...). `None` for unknown identifiers.
pub fn by_id(id: &str, norm: Normalization) -> Option<Result<Constellation>> {
    let id = id.to_ascii_lowercase();
    let c = match id.as_str() {
        "qam4" | "4qam" => make_qam(4, norm),
        "qam16" | "16qam" => make_qam(16, norm),
        "qam64" | "64qam" => make_qam(64, norm),
        "apsk8" | "apsk8-conventional" => make_apsk8_conventional(norm),
        "apsk16" | "apsk16-dvbs2" => make_apsk16_dvbs2(norm),
        "proposed-8" | "papsk8" | "grid-apsk8" => make_proposed8(norm),
        "proposed-16" | "papsk16" | "grid-apsk16" => make_proposed16(norm),
        other => {
            let m = other.strip_prefix("psk")?.parse::<usize>().ok()?;
            make_psk(m, norm)
        }
    };
    Some(c)
}
