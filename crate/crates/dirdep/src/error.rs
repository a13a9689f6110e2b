//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed numerical input: dimension mismatch, non-finite values,
    /// rows off the unit sphere, invalid permutations.
    #[error("invalid input: {0}")]
    Input(String),

    /// Invalid configuration: parameter out of range, unknown identifier,
    /// malformed spec string or config file.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A marginal sample carries no usable variation, so a normalized
    /// statistic is undefined.
    #[error("degenerate marginal: {0}")]
    DegenerateMarginal(String),

    /// A rejection sampler exceeded its proposal budget.
    #[error("sampler failure: {0}")]
    Sampler(String),

    /// Problems reading or interpreting a data file.
    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
