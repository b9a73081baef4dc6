use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },

    #[error("capacity exceeded: {needed} items requested, budget is {budget}")]
    CapacityExceeded { needed: u64, budget: u64 },

    #[error("pole at s = {re} + {im}i")]
    PoleAt { re: f64, im: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision exceeded: {0}")]
    PrecisionExceeded(String),

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("root finding failed: {0}")]
    RootFindFailure(String),

    #[error("no stationary point: n = {n} outside [{lo}, {hi}]")]
    NoStationaryPoint { n: i64, lo: f64, hi: f64 },

    #[error("singular point: bracket {bracket:e} at x = {x}")]
    SingularPoint { x: f64, bracket: f64 },

    #[error("invalid scenario, invariant `{invariant}` violated: {detail}")]
    InvalidScenario { invariant: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
