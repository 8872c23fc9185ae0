use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported jet order {0} (supported: 0..=4)")]
    UnsupportedOrder(usize),

    #[error("too many seeded directions: {0} (maximum 8)")]
    TooManyDirections(usize),

    #[error("multi-index {index:?} exceeds jet order {order}")]
    OutOfOrder { index: Vec<usize>, order: usize },

    #[error("direction index {index} out of range for a jet with {directions} directions")]
    BadDirection { index: usize, directions: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("fundamental tensor is not positive definite at x={x:?}, y={y:?}")]
    DegenerateMetric { x: Vec<f64>, y: Vec<f64> },

    #[error("flag is degenerate: u is (numerically) parallel to y (normalized Gram determinant {gram:e})")]
    DegenerateFlag { gram: f64 },

    #[error("quadrature did not reach tolerance: estimate {estimate}, standard error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid product profile: condition `{condition}` fails at (s, t) = ({s}, {t})")]
    InvalidProfile {
        condition: &'static str,
        s: f64,
        t: f64,
    },

    #[error("implicit equation could not be solved at x={x:?}, y={y:?}")]
    ImplicitSolve { x: Vec<f64>, y: Vec<f64> },

    #[error("point {0:?} lies outside the chart domain")]
    OutOfDomain(Vec<f64>),

    #[error("evaluation produced a non-finite value at x={x:?}, y={y:?}")]
    NonFinite { x: Vec<f64>, y: Vec<f64> },

    #[error("time grid too coarse: estimated derivative error {estimate:e} exceeds {tolerance:e}")]
    Resolution { estimate: f64, tolerance: f64 },

    #[error("integrator failed at t={t}: {reason}")]
    Integrator { t: f64, reason: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<toml::ser::Error> for Error {
    fn from(e: toml::ser::Error) -> Self {
        Error::Config(e.to_string())
    }
}
