use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("degenerate marginal: {0}")]
    DegenerateMarginal(String),
    #[error("pole proximity at p = {p} (denominator {denominator:e})")]
    PoleProximity { p: f64, denominator: f64 },
    #[error("no non-Markov witness found among the scanned zeros")]
    WitnessNotFound,
    #[error("nodal region at x = {x} (|psi| = {modulus:e})")]
    NodalRegion { x: f64, modulus: f64 },
    #[error("singular point x = {0}")]
    SingularPoint(f64),
    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: usize, needed: usize },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
