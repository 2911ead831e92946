use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid mesh, material, scenario or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Config text that could not be parsed (carries line information when available).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("linear solver failure: {reason} (relative residual {residual:e})")]
    Solver { reason: String, residual: f64 },

    #[error("solver failure at step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) => 2,
            Error::Solver { .. } => 3,
            Error::Step { source, .. } => source.exit_code(),
            Error::Certification(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
