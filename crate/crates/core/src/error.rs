use std::path::PathBuf;

/// Errors raised by the numerics and the command-line driver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range (valid: 0..{len})")]
    Index { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical accuracy not reached: {what} (achieved {achieved:.3e}, wanted {wanted:.3e})")]
    Accuracy {
        what: String,
        achieved: f64,
        wanted: f64,
    },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("basis truncation too small: {0}")]
    Truncation(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
