use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty restricted support")]
    EmptyRestrictedSupport,

    #[error("adaptive quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    IntegrationDiverged { estimate: f64, error_bound: f64 },

    #[error("quadrature order {0} out of range 1..=512")]
    OrderOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("recurrence coefficient b_{index} lost positivity ({value:e})")]
    PositivityLost { index: usize, value: f64 },

    #[error("Stieltjes mesh refinement did not converge at degree {0}")]
    MeshNotConverged(usize),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("biorthogonalization failed: condition estimate {condition:e}")]
    BiorthogonalizationFailed { condition: f64 },

    #[error("resolvent does not exist: Id - G_I is singular")]
    ResolventMissing,

    #[error("k = {k} is too large for the quadrature route (max {max}); use count-based survival instead")]
    QuadratureDimension { k: usize, max: usize },

    #[error("series did not converge within {terms} terms; use the CD form for large arguments")]
    SeriesDiverged { terms: usize },

    #[error("argument {0} exceeds the overflow guard")]
    OverflowGuard(f64),

    #[error("eigenvalue iteration cap exceeded")]
    IterationCap,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
