use thiserror::Error;

/// Failures reported by the numerical routines.
///
/// Every variant corresponds to a domain condition the caller can act on;
/// none of them indicate a bug in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("energy level degenerates at k = {k} (|k| = 1 touching-well band)")]
    DegenerateLevel { k: f64 },

    #[error("energy level is empty at k = {k}")]
    EmptyLevel { k: f64 },

    #[error("drift integral does not change sign on ({lo}, {hi})")]
    NoBracket { lo: f64, hi: f64 },

    #[error("energy drift {drift:e} exceeds tolerance; halve the step (dt = {dt})")]
    StepTooLarge { dt: f64, drift: f64 },

    #[error("trajectory spans {span} but at least {required} is needed")]
    SpanTooShort { span: f64, required: f64 },

    #[error("grid of {requested} points exceeds the limit of {limit}")]
    ResourceLimit { requested: usize, limit: usize },

    #[error("level set degenerates inside the window [{lo}, {hi})")]
    WindowInvalid { lo: f64, hi: f64 },

    #[error("no isolated eigenvalue within {tol:e} of {lambda}")]
    NotIsolated { lambda: f64, tol: f64 },

    #[error("eigenvalue curve {index} meets a neighbour near xi2 = {xi2} (gap {gap:e})")]
    CrossingDetected { index: usize, xi2: f64, gap: f64 },

    #[error("counting function has not vanished at xi2 cap {cap}")]
    DomainNotClosed { cap: f64 },

    #[error("numerical method did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DegenerateLevel { .. } => "DegenerateLevel",
            Error::EmptyLevel { .. } => "EmptyLevel",
            Error::NoBracket { .. } => "NoBracket",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::SpanTooShort { .. } => "SpanTooShort",
            Error::ResourceLimit { .. } => "ResourceLimit",
            Error::WindowInvalid { .. } => "WindowInvalid",
            Error::NotIsolated { .. } => "NotIsolated",
            Error::CrossingDetected { .. } => "CrossingDetected",
            Error::DomainNotClosed { .. } => "DomainNotClosed",
            Error::NoConvergence(_) => "NoConvergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
