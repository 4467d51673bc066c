use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported QAM size {0}; supported sizes are 4, 16 and 64")]
    UnsupportedQamSize(usize),
    #[error("PSK needs at least 2 points, got {0}")]
    PskTooSmall(usize),
    #[error("constellation needs at least 2 points")]
    SingletonConstellation,
    #[error("constellation is empty")]
    EmptyConstellation,
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("grid point ({x}, {y}) does not lie on ring m={m}, n={n}")]
    PointOffRing { x: i64, y: i64, m: i64, n: i64 },
    #[error("constellation {0} has no integer grid")]
    NotIntegerGrid(String),
    #[error("design coefficient must be finite and non-zero")]
    InvalidCoefficient,
    #[error("u - v = {0} lies outside [-sqrt(2), sqrt(2)]")]
    DifferenceOutOfRange(f64),
    #[error("difference tuple is all zero")]
    ZeroTuple,
    #[error("difference tuple is Case I; the perpendicular bound needs Case II")]
    NotCaseTwo,
    #[error("exhaustive search over {0} combinations exceeds the guard of {1}")]
    TooLarge(u128, u128),
    #[error("Case I table is empty")]
    EmptyTable,
    #[error("four-square precondition violated: 2^{} does not divide {sum}", 2 * .k)]
    FourSquarePrecondition { sum: i64, k: u32 },
    #[error("cross-term precondition violated")]
    CrossTermPrecondition,
    #[error("four-square dichotomy failed for ({0}, {1}, {2}, {3}) at k={4}")]
    DichotomyFailed(i64, i64, i64, i64, u32),
    #[error("need at least two family sizes")]
    TooFewSizes,
}
