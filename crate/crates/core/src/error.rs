use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no mastery data")]
    NoMasteryData,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown champion {0}")]
    UnknownChampion(u32),

    #[error("unknown player {0:?}")]
    UnknownPlayer(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate entry for player {player:?}, champion {champion}")]
    DuplicateRecord { player: String, champion: u32 },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("summoner not found: {0}")]
    SummonerNotFound(String),

    #[error("rate limited: gave up after {attempts} attempts")]
    RateLimited { attempts: u32 },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("training diverged: non-finite factor after epoch {epoch}")]
    Diverged { epoch: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    /// Whether the failure is attributable to caller input rather than the
    /// program or its environment.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::Diverged { .. } | Error::Transport(_)
        )
    }
}
