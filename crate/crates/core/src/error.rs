use thiserror::Error;

use crate::lp::LpStatus;
use crate::maxent::MaxEntResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown argument `{0}`")]
    UnknownArgument(String),

    #[error("duplicate argument `{0}`")]
    DuplicateArgument(String),

    #[error("invalid argument name `{0}`")]
    InvalidName(String),

    #[error("argument index {index} out of range for {len} arguments")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("argument `{0}` appears more than once in the query")]
    DuplicateLiteral(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid labelling: {0}")]
    InvalidLabelling(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} needs {n} arguments but the limit is {limit}")]
    TooManyArguments {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("formula syntax error at byte {pos}: {msg}")]
    FormulaSyntax { pos: usize, msg: String },

    #[error("constraint set is unsatisfiable (inconsistency value {value:.6e})")]
    Unsatisfiable { value: f64 },

    #[error("conditioning is inconsistent with the constraints (inconsistency value {value:.6e})")]
    ConditionInconsistent { value: f64 },

    #[error("linear program solver failed with status {0:?}")]
    SolverFailure(LpStatus),

    #[error("invalid linear program: {0}")]
    InvalidProblem(String),

    #[error(
        "maximum entropy solver did not converge after {} iterations (gap {:.3e})",
        .0.iterations, .0.gap
    )]
    NotConverged(Box<MaxEntResult>),
}
