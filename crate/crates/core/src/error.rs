use thiserror::Error;

/// Errors raised across the simulation and verification engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid caller input: bad qubit index, mismatched sizes, wrong graph for a formula.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested register or enumeration exceeds the configured budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// A projective measurement was forced onto an outcome that cannot occur.
    #[error("measurement outcome {outcome} on qubit {qubit} has zero probability")]
    ZeroProbability { qubit: usize, outcome: bool },

    #[error("unknown graph {name:?}; valid names: {valid}")]
    UnknownGraph { name: String, valid: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
