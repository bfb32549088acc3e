use std::path::PathBuf;

/// Errors produced anywhere in the detection chain.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("no valid depth at pixel ({x}, {y})")]
    NoDepth { x: f64, y: f64 },

    #[error("only {joints} keypoints could be lifted to 3D, at least {required} are required")]
    LiftFailure { joints: usize, required: usize },

    #[error("skeleton has {joints} joints, at least {required} are required")]
    InsufficientEvidence { joints: usize, required: usize },

    #[error("the labeling contains no ground points")]
    NoGround,

    #[error("unknown keypoint part name `{0}`")]
    UnknownPart(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("corpus is not labeled: {0}")]
    Unlabeled(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("notification sink failed: {0}")]
    Sink(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
