use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not symmetric")]
    Asymmetric,
    #[error("degenerate covariance")]
    DegenerateCovariance,
    #[error("unsupported degrees of freedom: {0} (only 2 and 3)")]
    UnsupportedDof(usize),
    #[error("probability out of range: {0}")]
    InvalidProbability(f64),
    #[error("method requires obstacle uncertainty")]
    DeterministicObstacle,
    #[error("linearization undefined at coincident means")]
    CoincidentMeans,
    #[error("unknown method id: {0}")]
    UnknownMethod(String),
    #[error("filter divergence")]
    FilterDivergence,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("at tick {tick}: {source}")]
    AtTick {
        tick: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
