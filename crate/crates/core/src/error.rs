use thiserror::Error;

/// Library error type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Case parameters violate an invariant of the pair.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A square norm or moment that must be nonzero with a fixed sign was not.
    #[error("degenerate functional: {0}")]
    DegenerateFunctional(String),

    /// Quadrature did not converge within the node budget.
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudget(String),

    /// Backward recurrence and quadrature disagree.
    #[error("loss of significance: {0}")]
    LossOfSignificance(String),

    /// Iterative solver did not converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Any other numerical failure (overflow, impossible spectrum, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidParameters(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
