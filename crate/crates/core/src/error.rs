use thiserror::Error;

/// Errors produced by the bandit library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar function was evaluated outside its domain.
    #[error("{function}: argument {value} is outside the domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Structural problem parameters are inconsistent.
    #[error("invalid problem parameters: {0}")]
    InvalidParams(String),

    /// The Robust MOSS tuning condition `eta * psi(2 eta / a) >= 2 a` fails.
    #[error(
        "parameter condition violated: eta*psi(2*eta/a) = {lhs:.6} < 2*a = {rhs:.6} (a = {a}, eta = {eta})"
    )]
    ConditionViolated {
        a: f64,
        eta: f64,
        lhs: f64,
        rhs: f64,
    },

    /// A policy or environment was configured inconsistently.
    #[error("configuration error: {0}")]
    Config(String),

    /// An estimate was requested from an arm with no samples.
    #[error("estimate requested from an arm with no samples")]
    NoSamples,

    /// Catoni's estimator needs more samples than `2 ln(1/delta)`.
    #[error("not enough samples: n = {n} but Catoni's estimator needs n > {required:.3}")]
    NotEnoughSamples { n: usize, required: f64 },

    /// `select_arm` was called after the horizon was exhausted.
    #[error("horizon exceeded: step {t} > T = {horizon}")]
    HorizonExceeded { t: usize, horizon: usize },

    /// Arm index outside `0..K`.
    #[error("arm {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },

    /// The requested absolute moment of a reward model is infinite.
    #[error("moment of order {order} diverges: {condition}")]
    DivergentMoment { order: f64, condition: String },

    /// Traces passed to aggregation do not share one recording grid.
    #[error("traces do not share a recording grid")]
    GridMismatch,

    /// An operation needed a non-empty input.
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(function: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        function,
        value,
        expected,
    }
}
