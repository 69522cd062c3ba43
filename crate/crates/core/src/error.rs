use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node `{0}`")]
    DuplicateNode(String),

    #[error("connection arrives before it departs (dep {dep}, arr {arr})")]
    InvalidConnection { dep: u32, arr: u32 },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("hierarchy levels required for contraction-hierarchy ordering")]
    MissingHierarchy,

    #[error("algorithm {0} is not prepared; call Engine::prepare first")]
    NotPrepared(&'static str),

    #[error("inconsistent shortcut unpacking: {0}")]
    Corrupt(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("agreement violation on query {query}: {details}")]
    AgreementViolation { query: usize, details: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
