use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid grade: {0}")]
    Grade(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("tuple violates SIP: {0}")]
    Sip(String),
    #[error("invalid tuple: {0}")]
    Tuple(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("unsupported field: {0}")]
    Field(String),
    #[error("not a permutation: {0}")]
    Permutation(String),
    #[error("pencil does not match the family template: {0}")]
    NotInFamily(String),
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical backend failed: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, Error>;
