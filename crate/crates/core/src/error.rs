use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    /// All terms cancelled during merging; a polynomial must keep at least one term.
    #[error("empty polynomial: all terms cancel")]
    EmptyPolynomial,

    #[error("unknown variable `{name}` at line {line}, column {col}")]
    UnknownVariable {
        name: String,
        line: usize,
        col: usize,
    },

    #[error("exponent {value} out of range (bound is {bound})")]
    ExponentOutOfRange { value: i64, bound: i64 },

    #[error("coefficient magnitude {value:e} exceeds the parse-time bound {bound:e}")]
    CoefficientOutOfRange { value: f64, bound: f64 },

    #[error("non-finite coefficient")]
    NonFiniteCoefficient,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("evaluation overflow: log-scale exponent {0:.1} outside the safe range +/-{1:.0}")]
    EvalOverflow(f64, f64),

    #[error("dimension {dim} exceeds the desk-scale guard ({max})")]
    DimensionGuard { dim: usize, max: usize },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("point set too large for exact facet enumeration: {points} points in dimension {dim}")]
    TooManyPoints { points: usize, dim: usize },

    /// Exact integer arithmetic left the 128-bit range and the big-integer
    /// escalation also failed to represent the result.
    #[error("exact integer arithmetic overflow")]
    ArithmeticOverflow,

    #[error("mixed volume inclusion-exclusion sum {sum} is not divisible by {dim}! = {factorial}; this signals an arithmetic bug")]
    MixedVolumeNotIntegral {
        sum: String,
        dim: usize,
        factorial: String,
    },

    #[error("conj'-degree {0} is odd; this signals an arithmetic bug")]
    OddBeta(u64),

    /// The Jacobian of the defining system is rank-deficient at the point.
    #[error("singular point of the variety")]
    SingularPoint,

    /// The enclosing intersection used by the exact curve solver is not
    /// zero-dimensional at this query; the caller is expected to resample.
    #[error("non-generic query: the enclosing intersection degenerates")]
    NonGenericQuery,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
