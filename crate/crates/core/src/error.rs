use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("ill-formed category: {0}")]
    BadCategory(String),
    #[error("ill-formed presheaf: {0}")]
    BadPresheaf(String),
    #[error("ill-formed map: {0}")]
    BadMap(String),
    #[error("dimension {dim} exceeds truncation {max}")]
    Truncation { dim: usize, max: usize },
    #[error("pasting diagram error: {0}")]
    Pasting(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("collection error: {0}")]
    Collection(String),
    #[error("outside the enumerated bounds: {0}")]
    OutOfBounds(String),
    #[error("operad error: {0}")]
    Operad(String),
    #[error("ill-formed term: {0}")]
    Term(String),
    #[error("chain complex error: {0}")]
    Chain(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, column, msg: msg.into() }
    }
}
