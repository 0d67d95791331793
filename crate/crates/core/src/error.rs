use std::path::PathBuf;

/// Errors produced anywhere in the stance pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}, record {record}: invalid body id `{value}`")]
    InvalidBodyId {
        path: PathBuf,
        record: u64,
        value: String,
    },

    #[error("duplicate body id {0}")]
    DuplicateBodyId(u64),

    #[error("body {0} has empty text")]
    EmptyBody(u64),

    #[error("unknown stance label `{0}`")]
    UnknownLabel(String),

    #[error("instances reference missing body ids: {0:?}")]
    DanglingBodyIds(Vec<u64>),

    #[error("need at least 2 distinct bodies to split, found {0}")]
    TooFewBodies(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} truth labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot score an empty label list")]
    EmptyInput,

    #[error("instance {0} has no gold stance")]
    Unlabeled(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("gradient contains a non-finite entry")]
    NonFiniteGradient,

    #[error("forward cache does not match this backward call: {0}")]
    StaleCache(String),

    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),

    #[error("corrupt tensor file: {0}")]
    CorruptTensorFile(String),

    #[error("corrupt manifest: {0}")]
    CorruptManifest(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
