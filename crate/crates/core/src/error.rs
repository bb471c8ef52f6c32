use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a permutation of 0..{n}: {ranking:?}")]
    NotAPermutation { n: usize, ranking: Vec<usize> },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid restriction: {0}")]
    InvalidRestriction(String),

    #[error("market too large for this operation: n = {n}, limit = {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid mechanism tree at node {node}: {reason}")]
    InvalidTree { node: usize, reason: String },

    #[error("profile outside the tree environment: applicant {applicant}")]
    OutsideEnvironment { applicant: usize },

    #[error("malformed subdomain: {0}")]
    MalformedSubdomain(String),

    #[error("priorities are not limited cyclic{}", .witness.as_ref().map(|w| format!("; {w}")).unwrap_or_default())]
    NotLimitedCyclic { witness: Option<String> },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
