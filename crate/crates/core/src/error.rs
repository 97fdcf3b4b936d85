use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {msg}")]
    Schema {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("{source_name}: row {row}: {msg}")]
    Data {
        source_name: String,
        row: usize,
        msg: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("qubit count {0} outside the supported range 1..={max}", max = crate::qsim::MAX_QUBITS)]
    QubitCap(usize),

    #[error("objective table has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("tree file line {line}: {msg}")]
    TreeFormat { line: usize, msg: String },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
