use thiserror::Error;

/// Errors reported by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Count data violating an input invariant (e.g. `x1 > n1`, `k > n`).
    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    /// A probability or level argument outside its domain.
    #[error("{name} must be in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    /// An attainable-support vector violating the null-model invariants.
    #[error("invalid support: {0}")]
    InvalidSupport(String),

    /// A family violating its construction invariants.
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// A 1-based rank outside `1..=m`.
    #[error("rank {rank} out of range 1..={m}")]
    RankOutOfRange { rank: usize, m: usize },

    /// A procedure identifier that does not name a known procedure.
    #[error("unknown procedure: {0:?}")]
    UnknownProcedure(String),

    /// A simulation configuration that cannot be run.
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
