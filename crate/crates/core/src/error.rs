use thiserror::Error;

/// Errors raised by theory construction, morphism algebra and the invariant pipelines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("theory mismatch: expected `{expected}`, found `{found}`")]
    TheoryMismatch { expected: String, found: String },
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("enumeration unavailable for `{0}`")]
    EnumerationUnavailable(String),
    #[error("cutoff exceeded: {what} has size {size}, cutoff {cutoff}")]
    CutoffExceeded {
        what: String,
        size: String,
        cutoff: u64,
    },
    #[error("rank {rank} too large: domain of {domain} points exceeds cap {cap}")]
    RankTooLarge {
        rank: usize,
        domain: String,
        cap: usize,
    },
    #[error("permutation domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("abelian quotient of index {index} exceeds cap {cap}")]
    QuotientTooLarge { index: u64, cap: u64 },
    #[error("morphism is not idempotent")]
    NotIdempotent,
    #[error("morphism is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("not a group homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("window {window} larger than chain of {stages} stages")]
    WindowLargerThanChain { window: usize, stages: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a configured resource limit rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::CutoffExceeded { .. } | Error::RankTooLarge { .. } | Error::QuotientTooLarge { .. }
        )
    }

    pub(crate) fn cutoff(what: impl Into<String>, size: impl ToString, cutoff: u64) -> Self {
        Error::CutoffExceeded {
            what: what.into(),
            size: size.to_string(),
            cutoff,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
