//! Standard-library companion to `stbc-core`: Monte Carlo simulation,
//! parallel gain sweeps, the reproduction tables, CSV and config-file
//! formats, and the `stbc` command-line tool.

pub mod cli;
pub mod config;
pub mod csvio;
pub mod par;
pub mod sim;
pub mod sweeps;
pub mod tables;
pub mod workers;

pub use stbc_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] stbc_core::Error),
    #[error("unknown constellation `{0}`")]
    UnknownConstellation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Looks up a constellation by id.
pub fn constellation(id: &str, norm: stbc_core::Normalization) -> Result<stbc_core::Constellation> {
    match stbc_core::constellation::by_id(id, norm) {
        Some(c) => Ok(c?),
        None => Err(Error::UnknownConstellation(id.into())),
    }
}
