//! Fast-decodable full-rate 2×2 space-time block code with a single
//! unit-modulus design coefficient.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation:
//!
//! * [`constellation`] builds QAM, PSK, conventional APSK and square-grid APSK
//!   signal sets and their difference sets.
//! * [`code`] builds codeword matrices and splits the determinant of a
//!   difference codeword into its coefficient-dependent and symbol-only parts.
//! * [`gain`] computes exact coding gains by exhaustive or aggregated search.
//! * [`optimize`] finds the best design coefficient, analytically for integer
//!   grids and by a piecewise-linear maximin search otherwise.
//! * [`lemmas`] holds executable forms of the divisibility facts behind the
//!   non-vanishing determinant.
//! * [`detect`] contains the maximum-likelihood and conditional (fast)
//!   detectors for the 2×2 channel.
//!
//! Random sampling, file formats and the command-line tool live in the `stbc`
//! companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod code;
pub mod constellation;
pub mod detect;
mod error;
pub mod gain;
pub mod lemmas;
pub mod optimize;
mod quant;

pub use num_complex::Complex64;

pub use code::{
    build_codeword, build_codeword_general, build_codeword_golden, case2_lower_bound,
    det_closed_form, Case, CodewordMatrix, DesignCoefficient, DetSplit, DifferenceTuple,
    GeneralCoefficients, Provenance,
};
pub use constellation::{Constellation, DifferenceSet, GridApskSpec, Normalization};
pub use error::{Error, Result};
pub use gain::{coding_gain, coding_gain_scaled, GainEngine, GainReport, Method};
pub use optimize::{optimize, OptimizationResult};
