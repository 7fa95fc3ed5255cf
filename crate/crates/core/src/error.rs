//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
///
/// The variants are grouped by the exit-code classes used by the command-line
/// front end: input problems ([`Error::Parse`], [`Error::InvalidGraph`]),
/// violated mathematical preconditions, and exhausted numerical budgets.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed textual input; positions are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Structurally invalid graph (e.g. legs in two connected components).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// An operation that needs a nonzero polynomial received zero.
    #[error("the polynomial is identically zero")]
    ZeroPolynomial,

    /// An infrared factorisation was requested for a subgraph that is not
    /// mass-momentum spanning.
    #[error("subgraph {0:?} is not mass-momentum spanning")]
    NotMassMomentumSpanning(Vec<u32>),

    /// A subgraph passed where a motic subgraph is required is not motic.
    #[error("subgraph {0:?} is not motic")]
    NotMotic(Vec<u32>),

    /// The axiomatic reconstruction could not determine a coefficient.  This
    /// signals a bug, never an expected mathematical situation.
    #[error("reconstruction stuck: {0}")]
    ReconstructionStuck(String),

    /// A family of subsets is not closed under unions or misses the ground set.
    #[error("family is not union-closed or does not contain the ground set: {0}")]
    NotUnionClosed(String),

    /// Space-time dimensions must be even positive integers.
    #[error("space-time dimension {0} is not an even positive integer")]
    OddDimension(u32),

    /// A numerator violates the homogeneity constraint.
    #[error("numerator has degree {found}, expected {expected}")]
    InhomogeneousNumerator { expected: i64, found: i64 },

    /// The requested integrand has a pole on the Feynman polytope.
    #[error("integrand is divergent; witness subgraph {witness:?}")]
    DivergentIntegrand { witness: Vec<u32> },

    /// A kinematic point outside the generic region.
    #[error("kinematic point is not generic: {0}")]
    NonGenericPoint(String),

    /// The integration budget was exhausted before the tolerance was met.
    #[error("integration budget exceeded: value {value} with error {error}")]
    BudgetExceeded { value: f64, error: f64 },

    /// Any other invalid argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::NotMassMomentumSpanning(_) => "NotMassMomentumSpanning",
            Error::NotMotic(_) => "NotMotic",
            Error::ReconstructionStuck(_) => "ReconstructionStuck",
            Error::NotUnionClosed(_) => "NotUnionClosed",
            Error::OddDimension(_) => "OddDimension",
            Error::InhomogeneousNumerator { .. } => "InhomogeneousNumerator",
            Error::DivergentIntegrand { .. } => "DivergentIntegrand",
            Error::NonGenericPoint(_) => "NonGenericPoint",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Process exit code used by the command-line interface:
    /// 2 for input errors, 3 for violated preconditions, 4 for exhausted
    /// budgets and 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::InvalidGraph(_) => 2,
            Error::NotMassMomentumSpanning(_)
            | Error::NotMotic(_)
            | Error::NotUnionClosed(_)
            | Error::OddDimension(_)
            | Error::InhomogeneousNumerator { .. }
            | Error::DivergentIntegrand { .. }
            | Error::NonGenericPoint(_)
            | Error::ZeroPolynomial => 3,
            Error::BudgetExceeded { .. } => 4,
            Error::ReconstructionStuck(_) | Error::InvalidInput(_) => 1,
        }
    }
}
