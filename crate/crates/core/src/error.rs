use thiserror::Error;

use crate::literal::Literal;

/// Errors raised by the constraint algebra, the engine and the analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("variable x{0} is already assigned")]
    AlreadyAssigned(u32),
    #[error("literal {0} does not occur in the constraint")]
    LiteralAbsent(Literal),
    #[error("weakening amount must lie in [1, {max}), got {amount}")]
    AmountOutOfRange { amount: String, max: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable x{0} does not occur with opposite signs in both constraints")]
    NoClash(u32),
    #[error("constraint is neither conflicting nor propagating under the assignment")]
    NotConflictingOrAssertive,
    #[error("constraint is conflicting at level 0")]
    ConflictAtRoot,
    #[error("model does not assign variable x{0}")]
    PartialModel(u32),
    #[error("instance has {vars} variables, above the oracle limit of {limit}")]
    OracleLimit { vars: usize, limit: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("solver produced a model violating the input: {0}")]
    ModelRejected(String),
}

/// A parse failure in an OPB file, located by line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpbError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: String },
}

impl OpbError {
    pub fn line(&self) -> usize {
        match self {
            OpbError::Syntax { line, .. } | OpbError::Unsupported { line, .. } => *line,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("instance sets differ between result files: {0}")]
    InstanceMismatch(String),
    #[error("{0}")]
    Invalid(String),
}
