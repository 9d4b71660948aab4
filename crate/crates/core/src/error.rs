use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile coefficients: {0}")]
    InvalidProfile(String),

    #[error("pole of profile at s = {s}")]
    Pole { s: f64 },

    #[error("profile family error: {0}")]
    Family(String),

    #[error("profile domain violation: {0}")]
    ProfileDomain(String),

    #[error("invalid step: {0}")]
    Step(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("degenerate geometry at s = {s}: {reason}")]
    Degenerate { s: f64, reason: String },

    #[error("rank deficient least-squares system: {0}")]
    Rank(String),

    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("curve has no Frenet frames")]
    MissingFrames,

    #[error("curve has no curvature/torsion data")]
    MissingIntrinsics,

    #[error("division by vanishing {what} at s = {s}")]
    Division { what: &'static str, s: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
