use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by model construction, sampling schemes, and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must lie in [{low}, {high}], got {value}")]
    OutOfRange {
        name: &'static str,
        low: f64,
        high: f64,
        value: f64,
    },

    #[error("rank {rank} out of range for set size {set_size}")]
    RankOutOfRange { rank: usize, set_size: usize },

    #[error("set size must be at least 2, got {0}")]
    SetSizeTooSmall(usize),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("{scheme} requires an {expected} set size, got n = {n}")]
    ParityMismatch {
        scheme: &'static str,
        expected: &'static str,
        n: usize,
    },

    #[error("sample was drawn under {found}, but the {expected} estimator was requested")]
    SchemeMismatch {
        expected: &'static str,
        found: String,
    },

    #[error("lambda must be positive for maximum-selection schemes, got {0}")]
    LambdaNotPositive(f64),

    #[error("direct sampling is not defined for {0}: the min-max pair is dependent")]
    UnsupportedDirectDraw(String),

    #[error("malformed sample: {0}")]
    MalformedSample(String),

    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },

    #[error("physical draw budget exceeded: {units} raw units requested (limit {limit})")]
    DrawBudgetExceeded { units: u128, limit: u128 },

    #[error("normalization constant w = {0} is not positive")]
    DegenerateWeight(f64),

    #[error("csv schema mismatch: {0}")]
    CsvSchema(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
