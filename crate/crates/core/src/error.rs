use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate paper_id `{0}`")]
    DuplicatePaper(String),

    #[error("paper `{0}` has an empty author list")]
    EmptyAuthors(String),

    #[error("paper `{paper}` lists author `{author}` more than once")]
    DuplicateAuthor { paper: String, author: String },

    #[error("invalid month: {0}")]
    InvalidMonth(String),

    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("cannot sample {requested} targets: no author has positive weight")]
    NoPositiveWeight { requested: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sample `{0}` is empty")]
    EmptySample(String),

    #[error("lag correlation undefined: all {0} months in the window are degenerate")]
    DegenerateCorrelation(usize),

    #[error("sweep cell (A={a}, w={w}) replicate {replicate}: {source}")]
    SweepCell {
        a: f64,
        w: u32,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("outputs differ from the recorded run: {}", .0.join(", "))]
    OutputMismatch(Vec<String>),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidKernel(_) | Error::InvalidMonth(_) => 1,
            Error::Stage { source, .. } | Error::SweepCell { source, .. } => source.exit_code(),
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::DuplicatePaper(_)
            | Error::EmptyAuthors(_)
            | Error::DuplicateAuthor { .. }
            | Error::NoPositiveWeight { .. }
            | Error::EmptySample(_)
            | Error::DegenerateCorrelation(_)
            | Error::OutputMismatch(_)
            | Error::Csv(_) => 2,
            Error::Json(_) => 3,
        }
    }
}
