use thiserror::Error;

/// Errors raised by the library and the batch front-end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("distance {distance} m is below the {reference} m reference distance")]
    DistanceBelowReference { distance: f64, reference: f64 },

    #[error("non-positive linear power {0} mW")]
    NonPositivePower(f64),

    #[error("hypergeometric argument {0} outside [0, 1)")]
    HypergeometricDomain(f64),

    #[error("user ring radius {radius} m reaches an interferer at {nearest} m")]
    RingTouchesInterferer { radius: f64, nearest: f64 },

    #[error("pilot power {power} dBm fell below the {floor} dBm floor")]
    PowerFloor { power: f64, floor: f64 },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("all {0} trials failed to converge")]
    AllTrialsNonConvergent(usize),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

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
