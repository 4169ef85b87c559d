//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CcopfError>;

#[derive(Debug, Error)]
pub enum CcopfError {
    /// Malformed case file; names the table, row and column where parsing failed.
    #[error("parse error in {table} row {row}, column {column}: {message}")]
    Parse {
        table: String,
        row: usize,
        column: usize,
        message: String,
    },

    /// Structurally invalid network or configuration data.
    #[error("validation error: {0}")]
    Validation(String),

    /// Building a conic program failed (dimension mismatch, unknown variable, ...).
    #[error("program build error: {0}")]
    Build(String),

    /// The conic backend reported something other than an optimal solution.
    #[error("solver failure ({status}): {message}")]
    Solver { status: String, message: String },

    /// An iterative procedure exhausted its iteration budget.
    #[error("{procedure} did not converge within {limit} iterations: {message}")]
    NonConvergence {
        procedure: String,
        limit: usize,
        message: String,
    },

    /// A linearization anchor is unusable (e.g. `c = 0` makes atan(s/c) directionless).
    #[error("linearization singularity: {0}")]
    Singularity(String),

    /// Tightened bounds crossed; the chance constraints cannot be satisfied.
    #[error("infeasible tightening on {quantity}: lower {lower} exceeds upper {upper}")]
    CrossedBounds {
        quantity: String,
        lower: f64,
        upper: f64,
    },

    #[error("power flow error: {0}")]
    PowerFlow(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
