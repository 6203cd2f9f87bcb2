use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Config(#[from] expsea_core::ConfigError),
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("simulation failed: {0}")]
    Simulation(expsea_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for anything wrong with the input, 2 for filesystem trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

impl From<expsea_core::Error> for Error {
    fn from(e: expsea_core::Error) -> Self {
        match e {
            expsea_core::Error::Config(c) => Error::Config(c),
            other => Error::Simulation(other),
        }
    }
}
