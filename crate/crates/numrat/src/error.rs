use thiserror::Error;

/// Coarse failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: unknown ids, bad literals, schema violations.
    Input,
    /// Structurally sound input that violates an operation's hypotheses.
    Precondition,
    /// A broken internal invariant; indicates a bug, not bad input.
    Internal,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),

    #[error("unknown curve id `{0}`")]
    UnknownCurve(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("bad support: {0}")]
    BadSupport(String),

    #[error("intersection form is singular")]
    SingularForm,

    #[error("intersection form is not negative definite")]
    NotNegativeDefinite,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("configuration fails validation: {0}")]
    InvalidConfig(String),

    #[error("search space too large: {visited} candidates visited (cap {cap}); retry with a smaller bound")]
    SearchCap { visited: u64, cap: u64 },

    #[error("graph of {vertices} vertices has too many connected subsets to enumerate (cap {cap})")]
    EnumerationCap { vertices: usize, cap: usize },

    #[error("not a recognized blowup pattern: {0}")]
    Pattern(String),

    #[error("internal invariant breach: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnknownVertex(_)
            | Error::UnknownCurve(_)
            | Error::Input(_)
            | Error::BadSupport(_) => ErrorKind::Input,
            Error::SingularForm
            | Error::NotNegativeDefinite
            | Error::Hypothesis(_)
            | Error::InvalidConfig(_)
            | Error::SearchCap { .. }
            | Error::EnumerationCap { .. }
            | Error::Pattern(_) => ErrorKind::Precondition,
            Error::Internal(_) => ErrorKind::Internal,
        }
    }

    /// Process exit code for the CLI: 1 internal, 2 input, 3 precondition.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Internal => 1,
            ErrorKind::Input => 2,
            ErrorKind::Precondition => 3,
        }
    }
}
