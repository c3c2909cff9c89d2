use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse-error: {0}")]
    Parse(String),

    #[error("no-solution-within-bounds: {0}")]
    NoSolutionWithinBounds(String),

    #[error("invertible-f^a: the product of f_i^a_i is a nonzero constant")]
    InvertibleTwist,

    #[error("empty-K: no component carries an f_j with a_j != 0")]
    EmptyK,

    #[error("unsupported-codimension: coset of codimension {0} in a union comparison")]
    UnsupportedCodimension(usize),

    #[error("empty coset: inconsistent binding characters")]
    EmptyCoset,

    #[error("solver cap exceeded: {unknowns} unknowns > cap {cap}")]
    SolverCapExceeded { unknowns: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
