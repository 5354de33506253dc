use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // kernel
    #[error("kernel table is not symmetric: J({offset}) = {left} but J(-{offset}) = {right}")]
    NonSymmetricTable { offset: f64, left: f64, right: f64 },
    #[error("kernel must be strictly positive at the origin (got {0})")]
    NonPositiveAtZero(f64),
    #[error("kernel has zero mass")]
    ZeroMass,
    #[error("moment generating function diverges at lambda = {0} (kernel is not thin-tailed)")]
    DivergentMgf(f64),
    #[error("first moment of the kernel tail diverges")]
    DivergentMoment,
    #[error("malformed kernel or profile table at line {line}: {reason}")]
    Table { line: usize, reason: String },

    // spectral
    #[error("grid spacing {dx} does not resolve kernel support {support} (need dx <= support/8)")]
    UnresolvedKernel { dx: f64, support: f64 },
    #[error("{what} did not converge after {iterations} iterations (last change {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("sigma = {sigma} must lie in (0, d1) with d1 = {d1}")]
    SigmaOutOfRange { sigma: f64, d1: f64 },

    // speed
    #[error("speed objective is monotone on the admissible range; no minimum bracketed")]
    NoBracket,
    #[error("semi-wave domain too short: profile at the far end differs from the limit by {0:e}")]
    DomainTooShort(f64),

    // simulator
    #[error("time step {dt} exceeds the explicit stability bound {dt_max}")]
    StabilityViolation { dt: f64, dt_max: f64 },
    #[error("front at {front} is within 2S of the truncation edge {edge}")]
    TruncationBreach { front: f64, edge: f64 },

    // thresholds
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("classification still undecided at mu = {mu} with horizon {horizon}")]
    UndecidableAtCap { mu: f64, horizon: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSymmetricTable { .. } => "NonSymmetricTable",
            Error::NonPositiveAtZero(_) => "NonPositiveAtZero",
            Error::ZeroMass => "ZeroMass",
            Error::DivergentMgf(_) => "DivergentMGF",
            Error::DivergentMoment => "DivergentMoment",
            Error::Table { .. } => "TableError",
            Error::UnresolvedKernel { .. } => "UnresolvedKernel",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SigmaOutOfRange { .. } => "SigmaOutOfRange",
            Error::NoBracket => "NoBracket",
            Error::DomainTooShort(_) => "DomainTooShort",
            Error::StabilityViolation { .. } => "StabilityViolation",
            Error::TruncationBreach { .. } => "TruncationBreach",
            Error::ConstraintViolated(_) => "ConstraintViolated",
            Error::UndecidableAtCap { .. } => "UndecidableAtCap",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
