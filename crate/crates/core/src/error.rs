use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge after {panels} panels (error estimate {estimate:e})")]
    NonConvergence { panels: usize, estimate: f64 },

    #[error("function returned NaN at x = {x}")]
    InvalidFunction { x: f64 },

    /// The integrand reached an infinite value on a set the rule sampled.
    #[error("integrand is infinite at x = {x}")]
    Divergent { x: f64 },

    #[error("matrix is singular (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("argument {value} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("sample has zero spread")]
    DegenerateSample,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: String, reason: String },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("parameter vector has length {got}, network expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("generator family has no closed-form pushforward density")]
    SampleOnly,

    #[error("training diverged at round {round}: {reason}")]
    DivergenceDetected { round: usize, reason: String },

    #[error("optimizer did not converge: {0}")]
    OptimizerNonConvergence(String),

    #[error("pair is not stationary: |grad_alpha L| = {grad_norm:e}")]
    StationarityViolated { grad_norm: f64 },

    #[error("first-order condition fails: mean of {which} = {mean:e} with standard error {se:e}")]
    MeanNotZero {
        which: &'static str,
        mean: f64,
        se: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
