use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("circles are not tangent (gap {gap:e})")]
    TangencyNotFound { gap: f64 },

    #[error("no positive constant C satisfies d(z) >= C|z-Q|^2 on the probe circle (min ratio {min_ratio:e})")]
    NoValidC { min_ratio: f64 },

    #[error("weight has no atomic Riesz measure: {0}")]
    UnsupportedMeasure(&'static str),

    #[error("quadrature tolerance not met: value {value}, error estimate {err:e}")]
    ToleranceNotMet { value: Complex64, err: f64 },

    #[error("non-integrable singularity near {point} (local order {order:.3})")]
    NonIntegrableSingularity { point: Complex64, order: f64 },

    #[error("growth rate {0} exceeds 1; the tail bound does not apply")]
    UnsupportedGrowth(f64),

    #[error("weight is degenerate: {0}")]
    DegenerateWeight(String),

    #[error("ill-conditioned basis (condition estimate {cond:e}); try a different center or scale")]
    IllConditioned { cond: f64 },

    #[error("cut ray meets the domain at {0}")]
    CutIntersectsDomain(Complex64),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("bound violated at ({x}, {y}): ratio {ratio}")]
    BoundViolated { x: f64, y: f64, ratio: f64 },

    #[error("total mass {0} is not below 2")]
    MassTooLarge(f64),

    #[error("no admissible Y found below {cap:e}")]
    NoValidY { cap: f64 },

    #[error("weight is not bounded above on the domain")]
    UnboundedWeight,
}

pub type Result<T> = std::result::Result<T, Error>;
