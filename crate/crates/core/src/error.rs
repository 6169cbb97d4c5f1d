use thiserror::Error;

/// Everything that can go wrong across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amount must be strictly positive, got {0}")]
    NonPositiveAmount(String),
    #[error("prior index must be nonnegative, got {0}")]
    NegativeIndex(i64),
    #[error("prior mass exceeds one: {0}")]
    MassExceedsOne(String),
    #[error("prior is improper (total mass {0})")]
    ImproperPrior(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("observation {0} has zero probability under the prior")]
    UnattainableObservation(String),
    #[error("density evaluation point must be positive, got {0}")]
    NonPositivePoint(f64),
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("rejection budget exceeded: accepted {kept} of {attempted} attempts")]
    BudgetExceeded { kept: u64, attempted: u64 },
    #[error("the two numbers must differ, both are {0}")]
    EqualNumbers(f64),
    #[error("numbers must be strictly positive, got ({0}, {1})")]
    NonPositiveNumbers(f64, f64),
    #[error("could not resolve the comparison within {0} bits of precision")]
    PrecisionExhausted(u32),
    #[error("invalid probe: {0}")]
    InvalidProbe(String),
    #[error("adversary search failed: {0}")]
    SearchFailed(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, used as the machine-readable error code.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveAmount(_) => "NonPositiveAmount",
            Error::NegativeIndex(_) => "NegativeIndex",
            Error::MassExceedsOne(_) => "MassExceedsOne",
            Error::ImproperPrior(_) => "ImproperPrior",
            Error::InvalidPrior(_) => "InvalidPrior",
            Error::UnattainableObservation(_) => "UnattainableObservation",
            Error::NonPositivePoint(_) => "NonPositivePoint",
            Error::ZeroTrials => "ZeroTrials",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::EqualNumbers(_) => "EqualNumbers",
            Error::NonPositiveNumbers(..) => "NonPositiveNumbers",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::InvalidProbe(_) => "InvalidProbe",
            Error::SearchFailed(_) => "SearchFailed",
            Error::InvalidStrategy(_) => "InvalidStrategy",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
