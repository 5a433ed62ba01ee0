use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Every entry of the jitter schedule produced a non-positive pivot.
    #[error("matrix of order {order} is not factorizable (last jitter tried: {last_jitter:e})")]
    NotFactorizable { order: usize, last_jitter: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid second moments (kxx={kxx}, kxy={kxy}, kyy={kyy})")]
    InvalidMoment { kxx: f64, kxy: f64, kyy: f64 },

    #[error("kernel evaluation failed at ({row}, {col}): {source}")]
    KernelAt {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite activation in layer {layer}")]
    NonFiniteActivation { layer: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trial reports cover different model sets")]
    InconsistentModels,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[cfg(feature = "cli")]
    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[cfg(feature = "cli")]
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }

    /// True for failures caused by the numbers rather than by inputs or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotFactorizable { .. }
            | Error::InvalidMoment { .. }
            | Error::NonFiniteActivation { .. }
            | Error::NonFiniteLoss { .. } => true,
            Error::KernelAt { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
