use thiserror::Error;

/// Errors raised by model evaluation, inference and validation routines.
#[derive(Debug, Error)]
pub enum ImError {
    #[error("numeric solver failure: {0}")]
    SolverFailure(String),

    #[error("no auxiliary value associates data {y} with parameter {theta}")]
    NoSolution { y: String, theta: String },

    #[error("optimizer did not converge: {0}")]
    NoConvergence(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown random set `{0}`")]
    UnknownRandomSet(String),

    #[error("every realization of the random set was empty; belief is undefined")]
    AllRealizationsEmpty,

    #[error("acceptance rate {rate:.3e} is below the floor {floor:.3e}")]
    AcceptanceTooLow { rate: f64, floor: f64 },

    #[error("distribution function decreases between {left} and {right}")]
    NonMonotone { left: f64, right: f64 },

    #[error("level-set crossing could not be bracketed: {0}")]
    GridTooCoarse(String),

    #[error("parameter window has {size} points; exhaustive enumeration is limited to {limit}")]
    WindowTooLarge { size: usize, limit: usize },

    #[error("the true parameter {0} lies inside the assertion")]
    ThetaInAssertion(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ImError>;
