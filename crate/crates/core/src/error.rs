use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Each variant belongs to one of four classes that the command-line front end
/// turns into exit codes; see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: column `{column}` not found in header")]
    MissingColumn { column: String },

    #[error("parse error at row {row}, column `{column}`: cannot read `{value}` as a finite number")]
    Parse { row: usize, column: String, value: String },

    #[error("malformed input at row {row}: {message}")]
    Malformed { row: usize, message: String },

    #[error("atomic strata need at least one auxiliary column; use continuous mode instead")]
    NoAuxiliaries,

    #[error("domain `{domain}` has a single basic stratum; nothing to cluster")]
    DegenerateDomain { domain: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precision for target `{target}` is undefined: estimated total is zero but the target varies")]
    InfeasiblePrecision { target: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("internal consistency fault: {0}")]
    Internal(String),

    #[error("stage {stage} ({algorithm}): {source}")]
    Stage {
        stage: usize,
        algorithm: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for configuration and input problems, 3 for
    /// infeasible precision targets, 4 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::InfeasiblePrecision { .. } => 3,
            Error::Invariant(_) | Error::Internal(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
