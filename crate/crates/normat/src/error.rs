use std::io;
use std::path::PathBuf;

pub type Result<T, E = DataError> = std::result::Result<T, E>;

/// Failures while reading, writing or validating datasets.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}:{line}: column `{column}`: {message}", path.display())]
    Parse { path: PathBuf, line: u64, column: String, message: String },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{}: invalid JSON: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("{}: row {row}: key `{key}` has no match in table `{table}`", path.display())]
    DanglingKey { path: PathBuf, table: String, row: usize, key: String },

    #[error("schema: {0}")]
    Schema(String),

    #[error("{0}")]
    InvalidParams(String),

    #[error(transparent)]
    Core(#[from] normat_core::Error),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> DataError {
        let path = path.into();
        move |source| DataError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> DataError {
        let path = path.into();
        move |source| DataError::Csv { path, source }
    }
}
