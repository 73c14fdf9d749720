use thiserror::Error;

/// Errors shared across the library.
///
/// Each variant corresponds to one user-facing failure class; the CLI maps
/// them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Not enough samples or points for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An iterated map or flow left its admissible region.
    #[error("divergence at step {step}: |state| = {magnitude:.3e} exceeds bound {bound:.3e}")]
    Divergence {
        step: usize,
        magnitude: f64,
        bound: f64,
    },

    /// A parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A series has zero range: min-max normalization is undefined.
    #[error("constant series: normalization and structure analysis are undefined")]
    ConstantSeries,

    /// No strict local maximum exists in the series.
    #[error("no maxima: the series has no strict local maximum")]
    NoMaxima,

    /// No window of the correlation curve fit a straight line well enough.
    #[error("no scaling region: no window of >= {min_window} radii reached R^2 >= {threshold}")]
    NoScalingRegion { min_window: usize, threshold: f64 },

    /// A plot projection referenced a coordinate outside the portrait.
    #[error("bad projection: coordinate index {index} out of range for dimension {dimension}")]
    BadProjection { index: usize, dimension: usize },

    /// An input file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An input file contained no usable samples.
    #[error("empty input: no samples found")]
    EmptyInput,

    /// Wrapped I/O failure with the offending path.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
