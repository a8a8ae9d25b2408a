use std::path::{Path, PathBuf};

use pommer_core::agents::AgentError;
use pommer_core::eval::EvalError;
use pommer_core::nn::NnError;
use pommer_core::train::TrainError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    BadArgs(String),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {detail}", path.display())]
    Corrupt { path: PathBuf, detail: String },
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("config hash mismatch: expected {expected}, found {found}")]
    ConfigMismatch { expected: String, found: String },
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl LabError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::BadArgs(_) | LabError::Agent(_) => 2,
            LabError::Io { .. } | LabError::Corrupt { .. } => 3,
            LabError::Verify(_) | LabError::ConfigMismatch { .. } => 4,
            LabError::Train(_) | LabError::Eval(_) => 1,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
        move |source| LabError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn corrupt(path: &Path, detail: impl Into<String>) -> LabError {
        LabError::Corrupt {
            path: path.to_path_buf(),
            detail: detail.into(),
        }
    }
}

impl From<NnError> for LabError {
    fn from(e: NnError) -> Self {
        LabError::Train(TrainError::Nn(e))
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
