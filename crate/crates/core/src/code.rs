//! Codeword construction and the determinant of difference codewords.
//!
//! With r = u + jv the codeword is
//!
//! ```text
//! X = [ s1 + r s3      j r* s2* - s4* ]
//!     [ s2 + r s4     -j r* s1* + s3* ]
//! ```
//!
//! and for a difference tuple (Δs₁..Δs₄), with A = |Δs₁|²+|Δs₂|²,
//! B = |Δs₃|²+|Δs₄|² and C = Δs₁Δs₃* + Δs₂Δs₄*,
//!
//! ```text
//! det(ΔX) = rB − j r* A + C − j C* = d1 − d2,
//! d1 = rB − j r* A,   d2 = d̃2 (1 − j),   d̃2 = Im C − Re C.
//! ```

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative tolerance used to decide A = B for floating-point tuples.
pub const CASE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    AnalyticTheorem1,
    Maximin,
    User,
}

impl Provenance {
    pub fn id(self) -> &'static str {
        match self {
            Provenance::AnalyticTheorem1 => "analytic",
            Provenance::Maximin => "maximin",
            Provenance::User => "user",
        }
    }
}

/// Which square root to take when recovering (u, v) from t = u − v.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Unit-modulus design coefficient r = u + jv.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignCoefficient {
    u: f64,
    v: f64,
    provenance: Provenance,
}

impl DesignCoefficient {
    /// Scales (u, v) onto the unit circle.
    pub fn new(u: f64, v: f64, provenance: Provenance) -> Result<Self> {
        let n = u.hypot(v);
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidCoefficient);
        }
        if (n - 1.0).abs() <= 1e-15 {
            return Ok(DesignCoefficient { u, v, provenance });
        }
        Ok(DesignCoefficient {
            u: u / n,
            v: v / n,
            provenance,
        })
    }

    pub fn user(u: f64, v: f64) -> Result<Self> {
        Self::new(u, v, Provenance::User)
    }

    /// u = (t ± √(2 − t²))/2, v = u − t.
    pub fn from_difference(t: f64, branch: Branch, provenance: Provenance) -> Result<Self> {
        let rad = 2.0 - t * t;
        if !t.is_finite() || rad < -1e-12 {
            return Err(Error::DifferenceOutOfRange(t));
        }
        let s = rad.max(0.0).sqrt();
        let u = match branch {
            Branch::Plus => (t + s) / 2.0,
            Branch::Minus => (t - s) / 2.0,
        };
        Ok(DesignCoefficient {
            u,
            v: u - t,
            provenance,
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// t = u − v.
    pub fn t(&self) -> f64 {
        self.u - self.v
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// Coefficients (a, b, c, d) of the general four-coefficient structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl GeneralCoefficients {
    /// a = 1, b = r, c = −j r*, d = 1.
    pub fn from_design(r: &DesignCoefficient) -> Self {
        let r = r.value();
        GeneralCoefficients {
            a: Complex64::new(1.0, 0.0),
            b: r,
            c: -J * r.conj(),
            d: Complex64::new(1.0, 0.0),
        }
    }
}

/// 2×2 codeword; rows are transmit antennas, columns channel uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodewordMatrix(pub [[Complex64; 2]; 2]);

impl CodewordMatrix {
    pub fn zero() -> Self {
        CodewordMatrix([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// M·Mᴴ.
    pub fn gram(&self) -> [[Complex64; 2]; 2] {
        let m = &self.0;
        let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in g.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                *cell = m[i][0] * m[k][0].conj() + m[i][1] * m[k][1].conj();
            }
        }
        g
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = *self;
        for row in &mut out.0 {
            for x in row {
                *x *= a;
            }
        }
        out
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum()
    }
}

impl Add for CodewordMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for k in 0..2 {
                out.0[i][k] += o.0[i][k];
            }
        }
        out
    }
}

impl Sub for CodewordMatrix {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for k in 0..2 {
                out.0[i][k] -= o.0[i][k];
            }
        }
        out
    }
}

impl Mul for CodewordMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = CodewordMatrix::zero();
        for i in 0..2 {
            for k in 0..2 {
                out.0[i][k] = self.0[i][0] * o.0[0][k] + self.0[i][1] * o.0[1][k];
            }
        }
        out
    }
}

pub fn build_codeword(s: [Complex64; 4], r: &DesignCoefficient) -> CodewordMatrix {
    codeword_a(s[0], s[1], r) + codeword_b(s[2], s[3], r)
}

/// X_A(s₁, s₂) = [[s₁, j r* s₂*], [s₂, −j r* s₁*]].
pub fn codeword_a(s1: Complex64, s2: Complex64, r: &DesignCoefficient) -> CodewordMatrix {
    let jr = J * r.value().conj();
    CodewordMatrix([[s1, jr * s2.conj()], [s2, -jr * s1.conj()]])
}

/// X_B(s₃, s₄) = [[r s₃, −s₄*], [r s₄, s₃*]].
pub fn codeword_b(s3: Complex64, s4: Complex64, r: &DesignCoefficient) -> CodewordMatrix {
    let r = r.value();
    CodewordMatrix([[r * s3, -s4.conj()], [r * s4, s3.conj()]])
}

pub fn build_codeword_general(s: [Complex64; 4], g: &GeneralCoefficients) -> CodewordMatrix {
    let [s1, s2, s3, s4] = s;
    CodewordMatrix([
        [g.a * s1 + g.b * s3, -g.c * s2.conj() - g.d * s4.conj()],
        [g.a * s2 + g.b * s4, g.c * s1.conj() + g.d * s3.conj()],
    ])
}

/// Golden code amplitude. Each entry carries average power 2 for unit-power
/// symbols, the same as an entry of [`build_codeword`], so coding gains of
/// the two codes compare directly.
pub fn golden_amplitude() -> f64 {
    (2.0 / 5.0).sqrt()
}

/// Golden code: √(2/5)·[[α(s₁+θs₂), α(s₃+θs₄)], [jᾱ(s₃+θ̄s₄), ᾱ(s₁+θ̄s₂)]]
/// with θ = (1+√5)/2, θ̄ = (1−√5)/2, α = 1 + j(1−θ), ᾱ = 1 + j(1−θ̄).
pub fn build_codeword_golden(s: [Complex64; 4]) -> CodewordMatrix {
    let s5 = 5.0.sqrt();
    let theta = (1.0 + s5) / 2.0;
    let theta_bar = (1.0 - s5) / 2.0;
    let alpha = Complex64::new(1.0, 1.0 - theta);
    let alpha_bar = Complex64::new(1.0, 1.0 - theta_bar);
    let [s1, s2, s3, s4] = s;
    CodewordMatrix([
        [alpha * (s1 + s2 * theta), alpha * (s3 + s4 * theta)],
        [
            J * alpha_bar * (s3 + s4 * theta_bar),
            alpha_bar * (s1 + s2 * theta_bar),
        ],
    ])
    .scale(golden_amplitude())
}

/// Case I: A = B; Case II otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    I,
    II,
}

impl Case {
    pub fn id(self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
        }
    }
}

pub(crate) fn classify(a: f64, b: f64) -> Case {
    if (a - b).abs() <= CASE_TOL * a.max(b).max(1.0) {
        Case::I
    } else {
        Case::II
    }
}

/// |det|² from (A, B, d̃₂) and r:
/// (uB − vA − d̃₂)² + (vB − uA + d̃₂)², which is 2(A t − d̃₂)² in Case I.
pub(crate) fn det_norm_sqr(a: f64, b: f64, d: f64, u: f64, v: f64, case: Case) -> f64 {
    match case {
        Case::I => {
            let x = a * (u - v) - d;
            2.0 * x * x
        }
        Case::II => {
            let p = u * b - v * a - d;
            let q = v * b - u * a + d;
            p * p + q * q
        }
    }
}

/// (Δs₁, Δs₂, Δs₃, Δs₄).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferenceTuple(pub [Complex64; 4]);

impl DifferenceTuple {
    pub fn new(ds: [Complex64; 4]) -> Self {
        DifferenceTuple(ds)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// |Δs₁|² + |Δs₂|².
    pub fn a(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    /// |Δs₃|² + |Δs₄|².
    pub fn b(&self) -> f64 {
        self.0[2].norm_sqr() + self.0[3].norm_sqr()
    }

    /// Δs₁Δs₃* + Δs₂Δs₄*.
    pub fn c(&self) -> Complex64 {
        self.0[0] * self.0[2].conj() + self.0[1] * self.0[3].conj()
    }

    /// Im C − Re C.
    pub fn d2_tilde(&self) -> f64 {
        let c = self.c();
        c.im - c.re
    }

    pub fn case(&self) -> Case {
        classify(self.a(), self.b())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        DifferenceTuple(self.0.map(|z| z * alpha))
    }
}

/// Result of the closed-form determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetSplit {
    pub det: Complex64,
    pub a: f64,
    pub b: f64,
    pub c: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d2_tilde: f64,
    pub case: Case,
}

impl DetSplit {
    pub fn norm_sqr(&self) -> f64 {
        self.det.norm_sqr()
    }
}

pub fn det_closed_form(t: &DifferenceTuple, r: &DesignCoefficient) -> Result<DetSplit> {
    if t.is_zero() {
        return Err(Error::ZeroTuple);
    }
    let rv = r.value();
    let (a, b, c) = (t.a(), t.b(), t.c());
    let d1 = rv * b - J * rv.conj() * a;
    let d2_tilde = c.im - c.re;
    let d2 = Complex64::new(d2_tilde, -d2_tilde);
    Ok(DetSplit {
        det: d1 - d2,
        a,
        b,
        c,
        d1,
        d2,
        d2_tilde,
        case: classify(a, b),
    })
}

/// (B − A)²(u+v)²/2: squared distance from d₁ to the line x + y = 0, a lower
/// bound on |det|² for Case II tuples.
pub fn case2_lower_bound(t: &DifferenceTuple, r: &DesignCoefficient) -> Result<f64> {
    if t.is_zero() {
        return Err(Error::ZeroTuple);
    }
    let (a, b) = (t.a(), t.b());
    if classify(a, b) == Case::I {
        return Err(Error::NotCaseTwo);
    }
    let s = r.u() + r.v();
    Ok((b - a) * (b - a) * s * s / 2.0)
}
