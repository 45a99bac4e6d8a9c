use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A raw input was not valid JSON for the expected schema.
    #[error("{file}: parse error at byte {offset}: {message}")]
    Parse {
        file: String,
        offset: usize,
        message: String,
    },

    /// Records reference ids that do not exist, or a record is incomplete.
    #[error("integrity error: {message} [{}]", ids.join(", "))]
    Integrity { message: String, ids: Vec<String> },

    #[error("no matches left after filtering (league {league:?}, gameweeks 1..={max_gameweek})")]
    EmptyDataset { league: String, max_gameweek: u32 },

    /// A value is outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("event {event_id} has no {anchor} coordinate")]
    MissingCoordinate { event_id: u64, anchor: &'static str },

    #[error("unsupported question: {0}")]
    UnsupportedQuestion(String),

    #[error("ambiguous team mention {mention:?}, candidates: {}", candidates.join(", "))]
    AmbiguousTeam {
        mention: String,
        candidates: Vec<String>,
    },

    #[error("teacher transport failed after {attempts} attempt(s): {message}")]
    TeacherTransport { attempts: u32, message: String },

    #[error("training diverged: loss is {0}")]
    Divergence(f64),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn integrity(message: impl Into<String>, ids: Vec<String>) -> Self {
        Error::Integrity {
            message: message.into(),
            ids,
        }
    }

    /// Innermost error, looking through pipeline stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
