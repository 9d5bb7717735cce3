use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("size limit exceeded for {what}: {actual} > {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid perfect elimination ordering: {0}")]
    InvalidPeo(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_limit(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::SizeLimit {
            what,
            limit,
            actual,
        })
    } else {
        Ok(())
    }
}
