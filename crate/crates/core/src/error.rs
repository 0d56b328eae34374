use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter lies outside the domain of the model.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation error: reached N_CAP={cap} with retained mass {achieved:.15} (needed {target:.15})")]
    Truncation {
        cap: usize,
        achieved: f64,
        target: f64,
    },

    /// Mandel Q has a vanishing denominator.
    #[error("Mandel Q undefined: mean excitation number {mean:e} is zero")]
    UndefinedQ { mean: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
