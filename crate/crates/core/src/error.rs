use std::io;

use thiserror::Error;

/// Errors raised anywhere in the framework.
///
/// `Abort` and `InconsistentBroadcast` are the two ways an honest party
/// learns that somebody deviated from the protocol; everything else is a
/// programming or configuration error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("value {value} does not fit in {bits} bits")]
    Overflow { value: u128, bits: u32 },
    #[error("duplicate interpolation point")]
    DuplicatePoint,
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("insufficient shares: need {needed}, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("replicated share copies disagree")]
    InconsistentReplicas,
    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),
    #[error("broadcast consistency check failed")]
    InconsistentBroadcast,
    #[error("protocol abort: {0}")]
    Abort(String),
    #[error("insufficient correlated randomness: {0}")]
    InsufficientRandomness(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("timed out")]
    Timeout,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
