use thiserror::Error;

/// Parse failure with the offending 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid generator spec: {0}")]
    SpecInvalid(String),
    #[error("scenario count {count} exceeds limit {limit}")]
    ScenarioLimitExceeded { count: u128, limit: usize },
    #[error("s-t path count exceeds limit {limit}")]
    PathLimitExceeded { limit: usize },
    #[error("cut enumeration over {nodes} nodes exceeds the {limit}-node limit")]
    CutLimitExceeded { nodes: usize, limit: usize },
    #[error("gamma1 requires Γ=1 (instance has Γ={gamma})")]
    GammaMismatch { gamma: usize },
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for the errors that signal an instance is outside desk-scale limits.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::ScenarioLimitExceeded { .. }
                | Error::PathLimitExceeded { .. }
                | Error::CutLimitExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
