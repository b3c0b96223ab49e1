use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("eigenvalue iteration did not converge after {iterations} QR sweeps")]
    NonConvergence { iterations: usize },

    #[error("rightmost eigenvalue {re:+.6e}{im:+.6e}i is defective or nearly so (|x*y| = {inner_product:.3e})")]
    DegenerateEigenvalue { re: f64, im: f64, inner_product: f64 },

    #[error("structured part of the perturbation vanishes (||Pi_S(uv*)||_F = {norm:.3e})")]
    ZeroStructuredPart { norm: f64 },

    #[error("structured gradient vanishes (||Pi_S(xy*)||_F = {norm:.3e}); Newton step undefined")]
    ZeroStructuredGradient { norm: f64 },

    #[error("exceptional stationary point: the current rank-1 direction is orthogonal to both eigenvectors")]
    ExceptionalStationaryPoint,

    #[error("matrix is not Hurwitz (spectral abscissa {abscissa:+.6e})")]
    NotHurwitz { abscissa: f64 },

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level set touches the grid boundary; enlarge the window")]
    ContourEscapesWindow,

    #[error("level set could not be closed into a contour")]
    OpenContour,

    #[error("time integration blew up at t = {t:.3e}; increase the number of steps")]
    StepSizeUnstable { t: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported Matrix Market field: {0}")]
    UnsupportedField(String),

    #[error("matrix dimension {n} exceeds the size guard {limit}; pass --allow-large to proceed")]
    TooLarge { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
