//! Monte Carlo bit-error simulation over the quasi-static 2×2 Rayleigh
//! channel.
//!
//! Conventions:
//! * symbols have unit average power and the codeword is sent scaled by
//!   1/√2, so each transmit antenna radiates unit average power;
//! * channel gains are CN(0, 1) and fixed over the two channel uses;
//! * SNR is received signal power per receive antenna per channel use over
//!   N₀, i.e. SNR = 2/N₀;
//! * every trial draws from its own ChaCha8 stream keyed by
//!   (seed, SNR index, trial index), so results do not depend on how trials
//!   are spread over threads.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use stbc_core::code::CodewordMatrix;
use stbc_core::detect::{superpose, ChannelMatrix, Detector, Received};
use stbc_core::{build_codeword, Complex64, Constellation, DesignCoefficient};

use crate::Error;

/// Transmit amplitude applied to every codeword entry.
pub const AMPLITUDE: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Trials handed to a worker at a time.
const BLOCK: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoder {
    Ml,
    Fast,
}

impl Decoder {
    pub fn id(self) -> &'static str {
        match self {
            Decoder::Ml => "ml",
            Decoder::Fast => "fast",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ml" => Some(Decoder::Ml),
            "fast" => Some(Decoder::Fast),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub r: DesignCoefficient,
    pub decoder: Decoder,
    pub snr_db: Vec<f64>,
    pub codewords: u64,
    pub seed: u64,
    /// Skip the noise entirely (a sanity mode; BER must be 0).
    pub noiseless: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.codewords == 0 {
            return Err(Error::Config("codewords per point must be at least 1".into()));
        }
        if self.snr_db.is_empty() || self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("SNR grid must be non-empty and strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub codewords: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub points: Vec<SnrPoint>,
    pub decoder: Decoder,
    pub seed: u64,
    pub elapsed: Duration,
}

/// N₀ for an SNR in dB under the SNR = 2/N₀ convention.
pub fn noise_variance(snr_db: f64) -> f64 {
    2.0 / 10f64.powf(snr_db / 10.0)
}

fn cn<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

pub fn random_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelMatrix {
    ChannelMatrix([[cn(rng, 1.0), cn(rng, 1.0)], [cn(rng, 1.0), cn(rng, 1.0)]])
}

/// `y[j][t] = Σᵢ h[i][j]·x[i][t] + n[j][t]` with n ~ CN(0, N₀). The codeword
/// is taken as transmitted, i.e. already scaled.
pub fn transmit<R: Rng + ?Sized>(x: &CodewordMatrix, h: &ChannelMatrix, n0: f64, rng: &mut R) -> Received {
    let mut y = superpose(x, h, 1.0);
    if n0 > 0.0 {
        for row in &mut y {
            for v in row {
                *v += cn(rng, n0);
            }
        }
    }
    y
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, snr_index: usize, trial: u64) -> u64 {
    let a = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let b = mix64(a ^ (snr_index as u64).wrapping_mul(0xd1b5_4a32_d192_ed03));
    mix64(b ^ trial.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7))
}

/// Bit errors in one codeword.
fn trial(
    c: &Constellation,
    det: &Detector,
    cfg: &SimConfig,
    n0: f64,
    rng: &mut ChaCha8Rng,
) -> u64 {
    let m = c.len();
    let idx: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..m));
    let h = random_channel(rng);
    let x = build_codeword(det.symbols(idx), &cfg.r).scale(AMPLITUDE);
    let y = transmit(&x, &h, if cfg.noiseless { 0.0 } else { n0 }, rng);
    let got = match cfg.decoder {
        Decoder::Fast => det.fast_decode(&y, &h),
        // the constellation size was checked against the guard up front
        Decoder::Ml => det.ml_decode_exhaustive(&y, &h).unwrap_or(idx),
    };
    let labels = c.labels();
    idx.iter()
        .zip(&got)
        .map(|(&a, &b)| (labels[a] ^ labels[b]).count_ones() as u64)
        .sum()
}

/// BER at every SNR of the grid on `workers` threads.
pub fn run_ber(c: &Constellation, cfg: &SimConfig, workers: usize) -> Result<SimResult, Error> {
    cfg.validate()?;
    let bps = c
        .bits_per_symbol()
        .ok_or_else(|| Error::Config(format!("{} has no whole number of bits per symbol", c.name())))?;
    if cfg.decoder == Decoder::Ml && (c.len() as u128).pow(4) > stbc_core::detect::ML_GUARD {
        return Err(stbc_core::Error::TooLarge((c.len() as u128).pow(4), stbc_core::detect::ML_GUARD).into());
    }
    let pool = crate::workers::pool(workers)?;
    let start = Instant::now();
    let det = Detector::new(c, cfg.r, AMPLITUDE);
    let blocks = cfg.codewords.div_ceil(BLOCK);
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (si, &snr) in cfg.snr_db.iter().enumerate() {
        let n0 = noise_variance(snr);
        let errors: u64 = pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let lo = b * BLOCK;
                    let hi = (lo + BLOCK).min(cfg.codewords);
                    (lo..hi)
                        .map(|t| {
                            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, si, t));
                            trial(c, &det, cfg, n0, &mut rng)
                        })
                        .sum::<u64>()
                })
                .sum()
        });
        let bits = cfg.codewords * 4 * bps as u64;
        points.push(SnrPoint {
            snr_db: snr,
            codewords: cfg.codewords,
            bits,
            bit_errors: errors,
            ber: errors as f64 / bits as f64,
        });
    }
    Ok(SimResult {
        points,
        decoder: cfg.decoder,
        seed: cfg.seed,
        elapsed: start.elapsed(),
    })
}

/// Magnitude of the least-squares slope of log₁₀ BER against SNR(dB)/10
/// over the points whose SNR lies in `window` (inclusive).
pub fn diversity_slope(res: &SimResult, window: (f64, f64)) -> Result<f64, Error> {
    let pts: Vec<&SnrPoint> = res
        .points
        .iter()
        .filter(|p| p.snr_db >= window.0 && p.snr_db <= window.1)
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData("fewer than two SNR points in the window".into()));
    }
    if let Some(p) = pts.iter().find(|p| p.bit_errors == 0) {
        return Err(Error::InsufficientData(format!("no bit errors at {} dB", p.snr_db)));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.snr_db / 10.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.ber.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok((sxy / sxx).abs())
}

/// The highest 10 dB span whose points all have at least `min_errors` bit
/// errors, as (low, high) SNR in dB.
pub fn highest_decade(res: &SimResult, min_errors: u64) -> Option<(f64, f64)> {
    let good: Vec<f64> = res
        .points
        .iter()
        .filter(|p| p.bit_errors >= min_errors)
        .map(|p| p.snr_db)
        .collect();
    let hi = *good.last()?;
    let lo = hi - 10.0;
    let inside = res.points.iter().filter(|p| p.snr_db >= lo - 1e-9 && p.snr_db <= hi);
    if inside.clone().any(|p| p.bit_errors < min_errors) || inside.count() < 2 {
        return None;
    }
    Some((lo - 1e-9, hi))
}
