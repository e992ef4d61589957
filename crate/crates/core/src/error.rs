use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("line spectrum must contain at least one component")]
    EmptySpectrum,

    #[error("reference signal has zero energy")]
    ZeroEnergy,

    #[error("beta = {beta} outside admissible interval ({lo}, {hi})")]
    BetaOutOfRange { beta: f64, lo: f64, hi: f64 },

    #[error("sample {index}: residual {value} is not an integer multiple of 2*lambda")]
    InconsistentResidual { index: usize, value: f64 },

    #[error("search space of {required} entries exceeds budget of {budget}")]
    BudgetExceeded { required: f64, budget: f64 },

    #[error("band order p = {p} too large for {n_vars} variables")]
    BandTooWide { p: usize, n_vars: usize },

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
