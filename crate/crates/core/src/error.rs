//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

/// Every fallible operation in the crate returns this error type. The
/// [`code`](Error::code) string is stable and is what the CLI reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands built under different coefficient contexts")]
    ContextMismatch,
    #[error("precision exhausted: accumulated loss {loss} reaches the {precision} retained digits")]
    PrecisionExhausted { loss: u32, precision: u32 },
    #[error("convergence violation: {0}")]
    ConvergenceViolation(String),
    #[error("not a unit: constant term is zero within precision")]
    NotAUnit,
    #[error("operands carry different coordinate systems")]
    CoordinateMismatch,
    #[error("substitution diverges: argument {index} has a nonzero constant term")]
    SubstitutionDiverges { index: usize },
    #[error("series is not regular in the leading variable up to the truncation degree")]
    NotRegular,
    #[error("truncation degree too small for the decomposition to stabilize")]
    TruncationTooSmall,
    #[error("eigenvalue {index} has {power}-th power congruent to 1; graded solves would divide by zero")]
    SmallRootOfUnity { index: usize, power: u32 },
    #[error("series does not generate an eigen-stable principal ideal to working precision")]
    NotEigenPrincipal,
    #[error("membership undecidable: ideal is neither polynomial-exact nor principal")]
    MembershipUndecidable,
    #[error("operation requires the polynomial-exact fragment (exactness flag with loss-free coefficients)")]
    ExactnessRequired,
    #[error("ideal does not linearize: eigen-homogeneous generator has degree {degree} >= 2")]
    NotLinearizable { degree: u32 },
    #[error("ideal is the maximal ideal, which is excluded")]
    MaximalIdeal,
    #[error("ideal is zero, which is excluded")]
    ZeroIdeal,
    #[error("no exact route to a minimal prime component; supply one explicitly")]
    ComponentOracleRequired,
    #[error("eigenvalues admit no common power up to the alignment budget {budget}")]
    NoAlignment { budget: u32 },
    #[error("finite-length cohomology precondition could not be verified: {0}")]
    PreconditionUnverified(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI report format.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::ContextMismatch => "ContextMismatch",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::ConvergenceViolation(_) => "ConvergenceViolation",
            Error::NotAUnit => "NotAUnit",
            Error::CoordinateMismatch => "CoordinateMismatch",
            Error::SubstitutionDiverges { .. } => "SubstitutionDiverges",
            Error::NotRegular => "NotRegular",
            Error::TruncationTooSmall => "TruncationTooSmall",
            Error::SmallRootOfUnity { .. } => "SmallRootOfUnity",
            Error::NotEigenPrincipal => "NotEigenPrincipal",
            Error::MembershipUndecidable => "MembershipUndecidable",
            Error::ExactnessRequired => "ExactnessRequired",
            Error::NotLinearizable { .. } => "NotLinearizable",
            Error::MaximalIdeal => "MaximalIdeal",
            Error::ZeroIdeal => "ZeroIdeal",
            Error::ComponentOracleRequired => "ComponentOracleRequired",
            Error::NoAlignment { .. } => "NoAlignment",
            Error::PreconditionUnverified(_) => "PreconditionUnverified",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
