use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Variants are grouped loosely by the stage that produces them; the
/// certificate verifier wraps failures in [`Error::Verification`] with the
/// name of the stage that rejected the certificate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("context mismatch between operands")]
    ContextMismatch,
    #[error("division by non-unit")]
    DivisionByNonUnit,
    #[error("division by uniformizer of an element with valuation 0")]
    NotDivisibleByUniformizer,
    #[error("element does not lie in the base ring Z_p")]
    NotInBaseRing,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("bad-reduction coefficient: {0}")]
    BadReduction(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("recentering required: inner series has a nonzero constant term")]
    RecenteringRequired,
    #[error("degree caps differ ({0} vs {1})")]
    DegreeCapMismatch(usize, usize),
    #[error("indeterminacy-adjacent center: denominator is not a unit")]
    IndeterminacyAdjacent,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("denominator vanishes identically modulo {0}")]
    DenominatorVanishes(u64),
    #[error("inseparable reduction modulo {0}: Jacobian determinant vanishes identically")]
    InseparableReduction(u64),
    #[error("map is not dominant: Jacobian determinant is identically zero")]
    NotDominant,
    #[error("no periodic point found up to extension degree {0}")]
    NoPeriodicPoint(u32),
    #[error("no good prime in range [{0}, {1}]")]
    NoGoodPrime(u64, u64),
    #[error("residue field mismatch: point lives in degree {point}, context residue degree {context}")]
    ResidueFieldMismatch { point: u32, context: u32 },
    #[error("orbit leaves the clear locus at step {0}")]
    OrbitNotClear(usize),
    #[error("divisibility violation at coordinate {coord}, multi-index {index:?}")]
    DivisibilityViolation { coord: usize, index: Vec<u32> },
    #[error("reduced linear part is singular")]
    SingularLinearPart,
    #[error("order search exceeded cap {0}")]
    OrderCapExceeded(u128),
    #[error("theory violation: coordinate {coord}, k = {k}, valuation {valuation} below bound {bound}")]
    TheoryViolation { coord: usize, k: usize, valuation: i64, bound: i64 },
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("certificate rejected at stage `{stage}`: {reason}")]
    Verification { stage: String, reason: String },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
