use thiserror::Error;

/// Errors produced by the numerical routines and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested integral, norm or supremum is infinite.
    #[error("divergent: {0}")]
    Divergent(String),
    /// Quadrature could not reach the requested tolerance.
    #[error("accuracy not reached: best estimate {best:e} with estimated error {est_error:e}")]
    Accuracy { best: f64, est_error: f64 },
    /// The operation is not implemented for this profile shape.
    #[error("unsupported profile shape: {0}")]
    Unsupported(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Error::Divergent(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
