use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The input violates a mathematical hypothesis (irreducibility, s > 0, ...).
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    #[error("degenerate interaction: every row of E is zero (s = 0)")]
    DegenerateInteraction,

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    /// Z_n = 0; `depth` is the first depth at which admissibility died.
    #[error("empty system: Z_n = 0 (admissibility died at depth {depth})")]
    EmptySystem { depth: usize },

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        needed: String,
        cap: u64,
    },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code used by the command line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidDimension(_) | Error::InvalidParameter(_) => 1,
            Error::Domain(_) | Error::BackendMismatch(_) => 1,
            Error::Hypothesis(_) | Error::DegenerateInteraction | Error::EmptySystem { .. } => 2,
            Error::ResourceCap { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
