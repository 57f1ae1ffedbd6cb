use thiserror::Error;

use crate::ordinal::Ordinal;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),

    #[error("set {set} is not a member of S_{alpha}")]
    NotMember { set: String, alpha: Ordinal },

    #[error("{what} exceeds the configured bound {bound}")]
    BoundExceeded { what: String, bound: u64 },

    #[error("expected {lower} < {upper}")]
    NotIncreasing { lower: Ordinal, upper: Ordinal },

    #[error("growth function is not non-decreasing at index {index}")]
    NotMonotone { index: usize },

    #[error("policy violates the approximating-sequence contract: {0}")]
    BadPolicy(String),

    #[error("zero vector has no normalized constant")]
    ZeroVector,

    #[error("index {index} lies outside the window 1..={window}")]
    OutsideWindow { index: u64, window: u64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}
