use std::path::PathBuf;

/// Errors raised by grids, operators, solvers and file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("size mismatch: expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids (n={left} vs n={right})")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("non-finite state at step {step} (t={t})")]
    NonFinite { step: usize, t: f64 },

    #[error("field is not mean-free (mean coefficient magnitude {0:e})")]
    NotMeanFree(f64),

    #[error("no forced modes: annulus {k_min} <= |k| <= {k_max} contains no lattice point")]
    NoForcedModes { k_min: f64, k_max: f64 },

    #[error("post-shock query: t={t} is not before the shock time {t_star}")]
    PostShock { t: f64, t_star: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing samples: {0}")]
    MissingSamples(String),

    #[error("format error in {path:?}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
