use thiserror::Error;

use crate::numerics::PowerSeries;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An evaluator returned a non-finite value.
    #[error("evaluation failed at {at}: {what}")]
    Evaluation { at: String, what: String },

    /// Cauchy-circle coefficients did not settle before the sample cap.
    #[error("Taylor coefficients did not converge with {points} circle points (change {change:.3e})")]
    Convergence {
        points: usize,
        change: f64,
        best: Box<PowerSeries>,
    },

    #[error("power series with vanishing constant term cannot be inverted")]
    SingularSeries,

    /// Panel contributions stopped decaying while the window was doubled.
    #[error("integral diverges: window contributions not decaying up to T = {window:.3e}")]
    Divergence { window: f64, partial: f64 },

    #[error("phase is not increasing at x = {x} (derivative {derivative:.3e})")]
    Monotonicity { x: f64, derivative: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("{t} is not a zero of B (|B(t)|/|E(t)| = {ratio:.3e})")]
    InvalidNode { t: f64, ratio: f64 },

    #[error("node {t} is degenerate: |B'(t)|/|E(t)| = {ratio:.3e}")]
    DegenerateNode { t: f64, ratio: f64 },

    #[error("quadrature did not reach tolerance: error estimate {estimate:.3e} for value {value:.3e}")]
    Quadrature { value: f64, estimate: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn eval(at: impl std::fmt::Display, what: impl Into<String>) -> Self {
        Error::Evaluation {
            at: at.to_string(),
            what: what.into(),
        }
    }

    /// Whether this error is a numerical failure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Parse(_) | Error::Domain(_) | Error::Io(_))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
