use thiserror::Error;

use crate::perturb::ConvergenceReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("invalid subspace: {0}")]
    InvalidSpec(String),

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("enumeration needs {needed} vectors, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("norm violates its sandwich constant: phi entry {value} exceeds c = {c} at pair ({i}, {j})")]
    SandwichViolation { i: usize, j: usize, value: f64, c: f64 },

    #[error("fixed-point iteration did not converge after {} iterations", .0.iterations)]
    NonConvergence(Box<ConvergenceReport>),

    #[error("oracle refused: {0}")]
    OracleRefused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
