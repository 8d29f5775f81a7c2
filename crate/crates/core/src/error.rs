use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must live on the same interval do not.
    #[error("domain mismatch: {0}")]
    Domain(String),

    /// The operation is not defined for this input (e.g. unbounded support).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A value fails its type invariants (mass, sign, ordering).
    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    /// The computation is well defined but exceeds what the exact routines
    /// handle (enumeration budget, missing density representation).
    #[error("capability: {0}")]
    Capability(String),

    /// An observation with zero predictive probability was fed to the filter.
    #[error("filter degeneracy: observation {observation} has zero probability")]
    FilterDegeneracy { observation: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
