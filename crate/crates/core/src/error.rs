use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("row {row} of the transition matrix is not stochastic (sum {sum}, min {min})")]
    NonStochasticRow { row: usize, sum: f64, min: f64 },
    #[error("variance must be positive and finite, got {0}")]
    NonPositiveVariance(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid initial distribution: {0}")]
    InvalidInitialDistribution(String),
    #[error("state index {index} out of range for {d} states")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("path length must be at least 1, got {0}")]
    InvalidLength(usize),
    #[error("invalid sufficient statistic: {0}")]
    InvalidStatistic(String),
    #[error("observation block is empty")]
    EmptyBlock,
    #[error("degenerate likelihood at step {step}: normalizing constant is zero or not finite")]
    DegenerateLikelihood { step: usize },
    #[error("accumulator is at t={acc} but step t={step} was requested")]
    IndexMismatch { acc: usize, step: usize },
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("invalid block schedule (c={c}, a={a}): need floor(c) >= 1 and a > 1")]
    InvalidSchedule { c: f64, a: f64 },
    #[error("state {state} is effectively unvisited (occupancy {occupancy:e})")]
    DegenerateState { state: usize, occupancy: f64 },
    #[error("estimated variance {0:e} is degenerate")]
    DegenerateVariance(f64),
    #[error("observation stream exhausted: need {needed}, have {available}")]
    StreamExhausted { needed: usize, available: usize },
    #[error("invalid step-size exponent {0}: must lie in (0.5, 1]")]
    InvalidStepSize(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("checkpoints span too little: {0}")]
    InsufficientSpan(String),
    #[error("trajectories have not converged: final RMSE {rmse} exceeds {bound}")]
    NotConverged { rmse: f64, bound: f64 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name, used in `ERROR <code>: <detail>` lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonStochasticRow { .. } => "NonStochasticRow",
            Error::NonPositiveVariance(_) => "NonPositiveVariance",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidInitialDistribution(_) => "InvalidInitialDistribution",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::InvalidLength(_) => "InvalidLength",
            Error::InvalidStatistic(_) => "InvalidStatistic",
            Error::EmptyBlock => "EmptyBlock",
            Error::DegenerateLikelihood { .. } => "DegenerateLikelihood",
            Error::IndexMismatch { .. } => "IndexMismatch",
            Error::TooLarge(_) => "TooLarge",
            Error::InvalidSchedule { .. } => "InvalidSchedule",
            Error::DegenerateState { .. } => "DegenerateState",
            Error::DegenerateVariance(_) => "DegenerateVariance",
            Error::StreamExhausted { .. } => "StreamExhausted",
            Error::InvalidStepSize(_) => "InvalidStepSize",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InsufficientSpan(_) => "InsufficientSpan",
            Error::NotConverged { .. } => "NotConverged",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
