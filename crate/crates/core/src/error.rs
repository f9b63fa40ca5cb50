use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A level, horizon or index falls outside what the object can answer.
    #[error("range error: {0}")]
    Range(String),

    /// Input violates a domain invariant (duplicate balls, ball not in urn, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Enumeration requested above the supported n! outcome space.
    #[error("capacity error: n = {n} exceeds enumeration cap {cap}")]
    Capacity { n: usize, cap: usize },

    /// Construction asked for a target whose finiteness forbids steering.
    #[error(
        "target is {0}: by the finite/cofinite case split every consistent probability \
         function gives the final ball probability {1} of landing in it, so no chain can steer it"
    )]
    NotSteerable(&'static str, u8),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
