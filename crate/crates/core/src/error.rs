use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// DIMACS text could not be parsed.
    #[error("dimacs line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A connected component is larger than the exact-search budget allows.
    #[error("component of {component} variables exceeds budget of {limit}")]
    Budget { component: usize, limit: usize },

    /// Rejection sampling ran out of attempts.
    #[error("no satisfiable formula after {attempts} attempts")]
    Exhausted { attempts: u64 },

    #[error("i/o: {0}")]
    Io(String),

    /// Every trial of an estimate was infeasible.
    #[error("all {trials} trials infeasible")]
    AllInfeasible { trials: u64 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
