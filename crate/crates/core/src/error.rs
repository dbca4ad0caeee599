use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum SolitonError {
    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The soliton vector field degenerates: with `mu = 0` the potential
    /// `Q = mu * sigma + c` is constant and the gradient construction
    /// collapses. Plain Kähler-Einstein quadrature is out of scope.
    #[error("mu = 0: soliton vector field degenerates to zero")]
    SteadyVectorFieldDegenerate,

    /// A sign condition failed (e.g. D-homothety between Einstein constants
    /// of opposite sign).
    #[error("sign mismatch: {0}")]
    SignMismatch(String),

    /// An evaluation point lies outside the admissible domain.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// An iterative solver failed to converge or a bracket could not be
    /// established.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// A tail extrapolation or quadrature did not reach its accuracy target.
    #[error("non-convergent: {0}")]
    NonConvergent(String),

    /// A numerically constructed object violates one of its invariants
    /// (positivity, boundary condition, aperture match).
    #[error("verification failure: {0}")]
    VerificationFailure(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SolitonError>;

impl SolitonError {
    /// Process exit code used by the command-line front end:
    /// 1 invalid parameters, 2 solver non-convergence, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            SolitonError::InvalidParameter(_)
            | SolitonError::SteadyVectorFieldDegenerate
            | SolitonError::SignMismatch(_)
            | SolitonError::OutOfDomain(_)
            | SolitonError::Io(_)
            | SolitonError::Json(_) => 1,
            SolitonError::SolverFailure(_) | SolitonError::NonConvergent(_) => 2,
            SolitonError::VerificationFailure(_) => 3,
        }
    }
}
