use thiserror::Error;

/// Errors produced by the solver, estimators and drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation at mesh node x = {x} requires a one-sided limit")]
    AmbiguousEvaluation { x: f64 },

    #[error("point x = {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("interior penalty form is not coercive for sigma = {sigma}")]
    NonCoercive { sigma: f64 },

    #[error("energy density does not provide a derivative of order {0}")]
    MissingDerivative(usize),

    #[error("solvability condition violated: right-hand side has integral {residual:e}")]
    Solvability { residual: f64 },

    #[error("Newton iteration failed at step {step} (t = {time}): residual history {residuals:?}")]
    NewtonDivergence {
        step: usize,
        time: f64,
        residuals: Vec<f64>,
    },

    #[error("insufficient history: need {needed} time levels, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable identifier, used by the CLI error JSON and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMesh(_) => "invalid_mesh",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::AmbiguousEvaluation { .. } => "ambiguous_evaluation",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Singular(_) => "singular",
            Error::NonCoercive { .. } => "non_coercive",
            Error::MissingDerivative(_) => "missing_derivative",
            Error::Solvability { .. } => "solvability",
            Error::NewtonDivergence { .. } => "newton_divergence",
            Error::InsufficientHistory { .. } => "insufficient_history",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
