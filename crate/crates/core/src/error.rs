use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: stencil width {width} exceeds {points} points")]
    GridTooCoarse { width: usize, points: usize },

    #[error("singular point at x = {x}")]
    SingularPoint { x: f64 },

    #[error("derivative of order {requested} unavailable (maximum {available})")]
    DerivativeUnavailable { requested: usize, available: usize },

    #[error("certification of {check} failed: residual {residual:.3e} exceeds {tolerance:.3e}")]
    CertificationFailed { check: String, residual: f64, tolerance: f64 },

    #[error("solution blew up at x = {x}")]
    BlowUp { x: f64 },

    #[error("eigenvalues did not converge: two-grid difference {difference:.3e}")]
    NonConvergence { difference: f64 },

    #[error("inverse-square coupling {gamma} is below the critical value {critical}")]
    Subcritical { gamma: f64, critical: f64 },

    #[error("spectrum too shallow: need {needed} levels, only {available} resolved")]
    DepthInsufficient { needed: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("operator order mismatch: {0}")]
    OrderMismatch(String),

    #[error("frequencies are not commensurate: {n1}·{w1} ≠ {n2}·{w2}")]
    FrequencyMismatch { n1: u32, w1: f64, n2: u32, w2: f64 },

    #[error("tensor grid of {points} points exceeds the cap of {cap}")]
    MemoryCap { points: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
