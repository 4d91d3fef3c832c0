use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("no eigenvalue bracket for {channel} n={n} in [{low}, {high}]")]
    NoBracket {
        channel: String,
        n: usize,
        low: f64,
        high: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("hamiltonian is not symmetric under exchange of particles {i} and {j} (deviation {deviation:e})")]
    NotExchangeSymmetric { i: usize, j: usize, deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
