use thiserror::Error;

/// Errors raised by every operation of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("index {index} out of range (allowed 1..={max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("size limit exceeded: {cap} allows {limit}, needed {required}")]
    SizeLimitExceeded {
        cap: &'static str,
        limit: u128,
        required: u128,
    },

    #[error("table error at line {line}: {message}")]
    Table { line: usize, message: String },

    #[error("algebra carrier must be non-empty")]
    EmptyCarrier,

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("generators do not generate the source algebra")]
    GeneratorsInsufficient,

    #[error("element is not a member of the lattice")]
    ElementNotInLattice,

    #[error("group axiom violated: {0}")]
    GroupAxiomViolation(String),

    #[error("action is not a homomorphism: {0}")]
    ActionNotHomomorphic(String),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("criteria conflict: {0}")]
    CriteriaConflict(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn table(line: usize, message: impl Into<String>) -> Self {
        Error::Table {
            line,
            message: message.into(),
        }
    }

    /// True for the variants that report an exceeded cap.
    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::SizeLimitExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
