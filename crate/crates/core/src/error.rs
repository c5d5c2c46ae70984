use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("eigensolver did not converge within {budget} iterations")]
    NoConvergence { budget: usize },
    #[error("matrix is not positive semi-definite (eigenvalue {eigenvalue:.6e})")]
    NotPsd { eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is singular to working precision (smallest eigenvalue {smallest:.3e})")]
    Singular { smallest: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("jammers {first} and {second} have collinear steering vectors")]
    DegenerateJammers { first: usize, second: usize },
    #[error("rank {rank} must be smaller than the dimension {dim}")]
    RankTooLarge { rank: usize, dim: usize },
    #[error("adaptive full-rank filter unavailable: sample covariance is singular (K = {k}, m = {m})")]
    AdaptiveFilterUnavailable { k: usize, m: usize },
    #[error("steering vector lies inside the interference subspace")]
    DegenerateSteering,
    #[error("separation condition violated for spike(s) {indices:?}{}", if *near_boundary { " (within 1e-9 of sqrt(c))" } else { "" })]
    SeparationViolated {
        indices: Vec<usize>,
        near_boundary: bool,
    },
    #[error("index {index} out of range (rank {rank})")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid scenario field `{field}`: {reason}")]
    InvalidScenario { field: &'static str, reason: String },
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input
    /// or an inapplicable asymptotic regime.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotPsd { .. }
                | Error::Singular { .. }
                | Error::NonFinite { .. }
                | Error::AdaptiveFilterUnavailable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
