use thiserror::Error;

use crate::closest::ProductPair;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid X-state parameters: {0}")]
    InvalidParams(String),

    #[error("not an X state: nonzero entries at {}", format_entries(.entries))]
    NotXState { entries: Vec<(usize, usize)> },

    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    #[error("closest product solver failed: {0}")]
    SolverFailure(String),

    #[error("minimizer did not converge (residual {residual:e}, F = {value})")]
    ConvergenceFailure {
        best: ProductPair,
        value: f64,
        residual: f64,
    },

    #[error("rejection sampling exhausted: accepted {accepted} of {drawn} draws")]
    RejectionExhausted { accepted: u64, drawn: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("oracle mismatch: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for unreadable input or bad arguments, 3 for
    /// states that are not physical (or not of the required form), 4 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Io(_)
            | Error::InvalidConfig(_)
            | Error::UnknownStrategy { .. } => 2,
            Error::InvalidState(_)
            | Error::InvalidParams(_)
            | Error::NotXState { .. }
            | Error::Unphysical(_) => 3,
            Error::SolverFailure(_)
            | Error::ConvergenceFailure { .. }
            | Error::RejectionExhausted { .. }
            | Error::Mismatch(_) => 4,
        }
    }
}

fn format_entries(entries: &[(usize, usize)]) -> String {
    entries
        .iter()
        .map(|(i, j)| format!("({},{})", i + 1, j + 1))
        .collect::<Vec<_>>()
        .join(", ")
}
