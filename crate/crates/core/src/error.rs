use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent {0}: must satisfy p >= 1")]
    InvalidExponent(f64),
    #[error("invalid exponent literal {0:?}")]
    ExponentLiteral(String),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no extremal of zero")]
    ZeroVector,
    #[error("operator is not square ({rows}x{cols}) or domain differs from codomain")]
    NotSquare { rows: usize, cols: usize },
    #[error("vertex enumeration too large: dimension {0} exceeds 20")]
    VertexEnumerationTooLarge(usize),
    #[error("no exact method for {0}")]
    NoExactMethod(String),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("restriction must be {expected}x{expected}, found {rows}x{cols}")]
    RestrictionShape { expected: usize, rows: usize, cols: usize },
    #[error("grid too coarse: N = {points} < 4n+2 = {required}")]
    GridTooCoarse { points: usize, required: usize },
    #[error("subspace is not invariant under group element {0}")]
    NotInvariant(usize),
    #[error("group has no identity element")]
    NoIdentity,
    #[error("not a projection onto the target subspace: {0}")]
    NotAProjection(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no valid sample directions")]
    NoValidDirections,
    #[error("linear program is {0}")]
    Lp(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
