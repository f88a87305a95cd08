use thiserror::Error;

/// Errors produced by the geometry, dynamics, observable and estimation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate ball: radius {radius} must lie in (0, 1/2)")]
    DegenerateBall { radius: String },

    #[error("point type does not match map variant {0}")]
    TypeMismatch(&'static str),

    #[error("operation not supported for {0}")]
    Unsupported(&'static str),

    #[error("preimage budget exceeded at j = {achieved_j}: {components} components > budget {budget}")]
    BudgetExceeded {
        achieved_j: usize,
        components: u128,
        budget: u128,
    },

    #[error("infeasible threshold: tau/n = {requested} exceeds available mass")]
    InfeasibleThreshold { requested: String },

    #[error("level {0} lies below the invertible range of the observable")]
    BelowInvertibleRange(f64),

    #[error("invalid frequency vector: {0}")]
    InvalidFrequency(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("point is not on the simplex: {0}")]
    OffSimplex(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("estimate undefined: {0}")]
    Undefined(String),

    #[error("zero trials requested")]
    ZeroTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
