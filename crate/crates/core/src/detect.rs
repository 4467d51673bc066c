//! Detection over the 2×2 quasi-static channel.
//!
//! The receiver sees `Y = a·Hᵀ·X + N` where `H[i][j]` is the gain from
//! transmit antenna i to receive antenna j, `a` is the transmit amplitude and
//! `Y[j][t]` is receive antenna j at channel use t.
//!
//! The conditional detector fixes (s₃, s₄), subtracts X_B and is left with
//! the Alamouti-type block X_A(s₁, s₂). Stacking the first received column
//! with the conjugate of the second (rotated by −j r*) gives an equivalent
//! channel whose two columns are orthogonal with squared norm ‖H‖²_F, so s₁
//! and s₂ are sliced independently. Over all M² hypotheses the decision is
//! exactly the maximum-likelihood one.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::code::{build_codeword, CodewordMatrix, DesignCoefficient};
use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// Largest M⁴ the exhaustive detector accepts.
pub const ML_GUARD: u128 = 100_000_000;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `h[i][j]`: transmit antenna i to receive antenna j.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelMatrix(pub [[Complex64; 2]; 2]);

impl ChannelMatrix {
    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        ChannelMatrix([[o, z], [z, o]])
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum()
    }
}

/// `y[j][t]`: receive antenna j, channel use t.
pub type Received = [[Complex64; 2]; 2];

/// Noiseless received block a·Hᵀ·X.
pub fn superpose(x: &CodewordMatrix, h: &ChannelMatrix, amplitude: f64) -> Received {
    let mut y = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (j, row) in y.iter_mut().enumerate() {
        for (t, cell) in row.iter_mut().enumerate() {
            *cell = (h.0[0][j] * x.0[0][t] + h.0[1][j] * x.0[1][t]) * amplitude;
        }
    }
    y
}

/// Columns of the equivalent channel for (s₁, s₂):
/// f₁ = [h₀; h₁*], f₂ = [h₁; −h₀*] with hᵢ the gains of transmit antenna i.
pub fn equivalent_channel(h: &ChannelMatrix) -> ([Complex64; 4], [Complex64; 4]) {
    let g1 = h.0[0];
    let g2 = h.0[1];
    (
        [g1[0], g1[1], g2[0].conj(), g2[1].conj()],
        [g2[0], g2[1], -g1[0].conj(), -g1[1].conj()],
    )
}

/// Maximum-likelihood detectors for one constellation, coefficient and
/// transmit amplitude.
#[derive(Clone, Debug)]
pub struct Detector<'a> {
    c: &'a Constellation,
    r: DesignCoefficient,
    amplitude: f64,
    /// a·X(p in slot k, zeros elsewhere) for every point p, slot-major.
    units: Vec<CodewordMatrix>,
}

/// Received contribution of every symbol in every slot for one channel.
/// The codeword is real-linear in (s₁, s₂, s₃, s₄), so the noiseless block
/// of any tuple is the sum of four table entries.
#[derive(Clone, Debug)]
pub struct Prepared {
    y: Received,
    m: usize,
    /// Slot-major: entry k·M + i is the contribution of point i in slot k.
    parts: Vec<Received>,
}

impl Prepared {
    pub fn part(&self, slot: usize, i: usize) -> &Received {
        &self.parts[slot * self.m + i]
    }

    /// ‖Y − a·Hᵀ·X(s)‖² from the tables; both detectors rank by this.
    #[inline]
    pub fn metric(&self, idx: [usize; 4]) -> f64 {
        let [p0, p1, p2, p3] = [
            self.part(0, idx[0]),
            self.part(1, idx[1]),
            self.part(2, idx[2]),
            self.part(3, idx[3]),
        ];
        let mut m = 0.0;
        for j in 0..2 {
            for t in 0..2 {
                m += (self.y[j][t] - (p0[j][t] + p1[j][t] + p2[j][t] + p3[j][t])).norm_sqr();
            }
        }
        m
    }
}

impl<'a> Detector<'a> {
    pub fn new(c: &'a Constellation, r: DesignCoefficient, amplitude: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let mut units = Vec::with_capacity(4 * c.len());
        for slot in 0..4 {
            for &p in c.points() {
                let mut s = [z; 4];
                s[slot] = p;
                units.push(build_codeword(s, &r).scale(amplitude));
            }
        }
        Detector { c, r, amplitude, units }
    }

    pub fn symbols(&self, idx: [usize; 4]) -> [Complex64; 4] {
        idx.map(|i| self.c.points()[i])
    }

    /// ‖Y − a·Hᵀ·X(s)‖² evaluated directly from the codeword.
    pub fn metric(&self, y: &Received, h: &ChannelMatrix, idx: [usize; 4]) -> f64 {
        let x = build_codeword(self.symbols(idx), &self.r);
        let s = superpose(&x, h, self.amplitude);
        let mut m = 0.0;
        for j in 0..2 {
            for t in 0..2 {
                m += (y[j][t] - s[j][t]).norm_sqr();
            }
        }
        m
    }

    pub fn prepare(&self, y: &Received, h: &ChannelMatrix) -> Prepared {
        Prepared {
            y: *y,
            m: self.c.len(),
            parts: self.units.iter().map(|x| superpose(x, h, 1.0)).collect(),
        }
    }

    /// Argmin over all M⁴ tuples; the lexicographically first index tuple
    /// wins ties.
    pub fn ml_decode_exhaustive(&self, y: &Received, h: &ChannelMatrix) -> Result<[usize; 4]> {
        let m = self.c.len();
        if (m as u128).pow(4) > ML_GUARD {
            return Err(Error::TooLarge((m as u128).pow(4), ML_GUARD));
        }
        let prep = self.prepare(y, h);
        let mut best = [0; 4];
        let mut best_m = f64::INFINITY;
        for i1 in 0..m {
            for i2 in 0..m {
                for i3 in 0..m {
                    for i4 in 0..m {
                        let idx = [i1, i2, i3, i4];
                        let v = prep.metric(idx);
                        if v < best_m {
                            best_m = v;
                            best = idx;
                        }
                    }
                }
            }
        }
        Ok(best)
    }

    /// Conditional detection over the M² hypotheses for (s₃, s₄).
    pub fn fast_decode(&self, y: &Received, h: &ChannelMatrix) -> [usize; 4] {
        let prep = self.prepare(y, h);
        let (g1, g2) = (h.0[0], h.0[1]);
        let norm = self.amplitude * h.frobenius_sqr();
        let rho = -J * self.r.value().conj();
        // Matched filters on [z₁; ρ·conj(z₂)]; real-linear in the block.
        let project = |b: &Received| -> (Complex64, Complex64) {
            let w = [rho * b[0][1].conj(), rho * b[1][1].conj()];
            (
                g1[0].conj() * b[0][0] + g1[1].conj() * b[1][0] + g2[0] * w[0] + g2[1] * w[1],
                g2[0].conj() * b[0][0] + g2[1].conj() * b[1][0] - g1[0] * w[0] - g1[1] * w[1],
            )
        };
        let py = project(y);
        let m = self.c.len();
        let p3: Vec<_> = (0..m).map(|i| project(prep.part(2, i))).collect();
        let p4: Vec<_> = (0..m).map(|i| project(prep.part(3, i))).collect();
        let mut best = [0; 4];
        let mut best_m = f64::INFINITY;
        for i3 in 0..m {
            for i4 in 0..m {
                let q1 = py.0 - p3[i3].0 - p4[i4].0;
                let q2 = py.1 - p3[i3].1 - p4[i4].1;
                let i1 = self.c.nearest_fast(q1 / norm);
                let i2 = self.c.nearest_fast(q2 / norm);
                let idx = [i1, i2, i3, i4];
                let v = prep.metric(idx);
                if v < best_m || (v == best_m && idx < best) {
                    best_m = v;
                    best = idx;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_qam, Normalization};
    use crate::optimize::analytic_integer_optimum;

    #[test]
    fn identity_channel_passes_codeword() {
        let c = make_qam(4, Normalization::UnitAveragePower).unwrap();
        let r = analytic_integer_optimum()[0];
        let s = [c.points()[0], c.points()[1], c.points()[2], c.points()[3]];
        let x = build_codeword(s, &r);
        let y = superpose(&x, &ChannelMatrix::identity(), 1.0);
        for j in 0..2 {
            for t in 0..2 {
                assert_eq!(y[j][t], x.0[j][t]);
            }
        }
    }

    #[test]
    fn noiseless_decoding() {
        let c = make_qam(16, Normalization::UnitAveragePower).unwrap();
        let r = analytic_integer_optimum()[0];
        let h = ChannelMatrix([
            [Complex64::new(0.3, -1.1), Complex64::new(0.7, 0.2)],
            [Complex64::new(-0.4, 0.5), Complex64::new(1.2, 0.9)],
        ]);
        let det = Detector::new(&c, r, core::f64::consts::FRAC_1_SQRT_2);
        for idx in [[0, 5, 10, 15], [3, 3, 7, 1], [15, 0, 0, 8]] {
            let x = build_codeword(det.symbols(idx), &r);
            let y = superpose(&x, &h, core::f64::consts::FRAC_1_SQRT_2);
            assert_eq!(det.fast_decode(&y, &h), idx);
        }
    }

    #[test]
    fn equivalent_columns_orthogonal() {
        let h = ChannelMatrix([
            [Complex64::new(0.3, -1.1), Complex64::new(0.7, 0.2)],
            [Complex64::new(-0.4, 0.5), Complex64::new(1.2, 0.9)],
        ]);
        let (f1, f2) = equivalent_channel(&h);
        let ip: Complex64 = f1.iter().zip(&f2).map(|(a, b)| a.conj() * b).sum();
        assert!(ip.norm() < 1e-15);
    }
}
