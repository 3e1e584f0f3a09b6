use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {n} is below the first defined index {min} of the {k}-bonacci sequence")]
    IndexBelowRange { k: u32, n: i64, min: i64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by a ball that contains zero")]
    DivisionByAmbiguousZero,
    #[error("comparison could not be resolved at {bits} bits: {what}")]
    Indeterminate { what: String, bits: u32 },
    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { what: String, bits: u32 },
    #[error("constant chain violated at step `{step}` (input {input})")]
    ChainViolation { step: String, input: u64 },
    #[error("no convergent with certified positive epsilon among {tried} candidates")]
    NoPositiveEpsilon { tried: usize },
    #[error("projected memory {projected} bytes exceeds cap {cap} bytes")]
    ResourceLimit { projected: u64, cap: u64 },
    #[error("configuration exceeds brute-force oracle scale: {0}")]
    OracleScaleExceeded(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Precision,
    Resource,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Indeterminate { .. } | Error::PrecisionExhausted { .. } => ErrorKind::Precision,
            Error::ResourceLimit { .. } => ErrorKind::Resource,
            Error::Invariant(_) => ErrorKind::Internal,
            _ => ErrorKind::Domain,
        }
    }

    /// Errors that may disappear at a higher working precision.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            Error::Indeterminate { .. }
                | Error::PrecisionExhausted { .. }
                | Error::DivisionByAmbiguousZero
        )
    }

    pub(crate) fn indeterminate(what: impl Into<String>, bits: u32) -> Self {
        Error::Indeterminate {
            what: what.into(),
            bits,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
