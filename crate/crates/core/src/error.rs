use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sequence {id:?}: invalid character {ch:?} (alphabet {alphabet})")]
    InvalidResidue { id: String, ch: char, alphabet: String },

    #[error("invalid sequence set: {0}")]
    InvalidSet(String),

    #[error("sequence {id:?} has length {len}, longer than target length {target_len}")]
    Length { id: String, len: usize, target_len: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unknown id {0:?}")]
    Lookup(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("matrix of {rows}x{cols} needs {bytes} bytes, which cannot be allocated")]
    Capacity { rows: usize, cols: usize, bytes: u128 },

    #[error("non-finite value at layer {layer}")]
    Numeric { layer: usize },

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("{stage}: {path}: {source}")]
    Stage {
        stage: String,
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attaches the pipeline stage and file path that produced this error.
    pub fn at(self, stage: &str, path: impl Into<PathBuf>) -> Error {
        Error::Stage {
            stage: stage.to_string(),
            path: path.into(),
            source: Box::new(self),
        }
    }
}
