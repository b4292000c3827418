use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("element is zero and has no inverse")]
    ZeroDivisor,
    #[error("operands live in different cyclotomic fields (orders {0} and {1})")]
    FieldMismatch(u32, u32),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("exact division left a nonzero remainder of degree {degree}")]
    NonZeroRemainder { degree: usize },
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),
    #[error("linear system is inconsistent (row for l = {row} contradicts the others)")]
    InconsistentSystem { row: i64 },
    #[error("linear system is under-determined: rank {rank} < {unknowns} unknowns")]
    UnderDetermined { rank: usize, unknowns: usize },
    #[error("closed-form coefficient has a vanishing denominator (k = {k}, j = {j})")]
    ZeroDenominator { k: usize, j: usize },
    #[error("solved Q violates invariant: {0}")]
    InvariantViolation(String),
    #[error("root finder did not converge; worst relative residual {worst:e}")]
    NonConvergence { worst: f64 },
    #[error("Bethe root {index} sits on a pole of the Bethe equations")]
    PoleProximity { index: usize },
    #[error("interpolation nodes are not pairwise distinct")]
    DuplicateNodes,
    #[error("Q(zq) and Q(zq^-1) share a factor of degree {gcd_degree}")]
    NotCoprime { gcd_degree: usize },
    #[error("coefficient map for F is singular at degree {k}")]
    FSolveSingular { k: usize },
    #[error("identity {name} violated; residual has degree {residual_degree}")]
    IdentityViolation {
        name: String,
        residual_degree: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that signal a broken internal invariant rather than bad input.
    pub fn is_alarm(&self) -> bool {
        matches!(
            self,
            Error::NonZeroRemainder { .. }
                | Error::InconsistentSystem { .. }
                | Error::UnderDetermined { .. }
                | Error::ZeroDenominator { .. }
                | Error::InvariantViolation(_)
                | Error::FSolveSingular { .. }
                | Error::NotCoprime { .. }
                | Error::ZeroDivisor
                | Error::FieldMismatch(..)
                | Error::DivisionByZero
        )
    }
}
