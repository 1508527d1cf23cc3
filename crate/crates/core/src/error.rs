use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight vector has zero mass")]
    ZeroMass,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid epsilon {0}")]
    InvalidEpsilon(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension {d} exceeds the dense limit {limit}")]
    TooLarge { d: usize, limit: usize },
    #[error("negative score {value} at index {index}")]
    NegativeScore { index: usize, value: f64 },
    #[error("filter parameter b = {0} is outside (0, 1)")]
    InvalidB(f64),
    #[error("randomized filter did not terminate within {rounds} rounds")]
    NonTermination { rounds: usize },
    #[error("naive pruning failed after {rounds} rounds")]
    PruneFailed { rounds: usize },
    #[error("robust filter did not converge within {epochs} epochs")]
    NonConvergence { epochs: usize },
    #[error("covariance is degenerate (all points identical)")]
    DegenerateCovariance,
    #[error("reference covariance is singular beyond ridge rescue")]
    SingularReference,
    #[error("ROCAUC needs at least one inlier and one outlier")]
    OneClassOnly,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
