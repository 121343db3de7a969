use thiserror::Error;

use crate::model::EquilibriumReport;
use crate::ode::OdeError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// α and q_e do not describe the same isotherm point.
    #[error("inconsistent isotherm parameters: alpha={alpha}, q_e={q_e}, n={n} (relative mismatch {mismatch:.3e})")]
    Inconsistent { alpha: f64, q_e: f64, n: u32, mismatch: f64 },

    /// No decreasing travelling wave joins the saturated and clean states.
    #[error("no travelling wave to the clean state for m={}, n={}: {:?}", .0.orders.m, .0.orders.n, .0.reason)]
    Existence(Box<EquilibriumReport>),

    #[error("degenerate far-field states: {0}")]
    DegenerateStates(String),

    #[error("degenerate system: {0}")]
    DegenerateSystem(String),

    /// The wave trajectory left the physically meaningful strip.
    #[error("trajectory diverged at eta={eta:.6e} with F={f:.6e}")]
    Divergence { eta: f64, f: f64 },

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("step size underflow at t={t:.6e} (h={h:.3e}); refine the grid or reduce the Pe contrast")]
    Stiffness { t: f64, h: f64 },

    #[error("profile does not cover the requested range: {0}")]
    Coverage(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<OdeError> for Error {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::StepSizeUnderflow { t, h } => Error::Stiffness { t, h },
            other => Error::Convergence(other.to_string()),
        }
    }
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Inconsistent { .. } => "consistency",
            Error::Existence(_) => "existence",
            Error::DegenerateStates(_) => "degenerate-states",
            Error::DegenerateSystem(_) => "degenerate-system",
            Error::Divergence { .. } => "divergence",
            Error::Convergence(_) => "convergence",
            Error::Stiffness { .. } => "stiffness",
            Error::Coverage(_) => "coverage",
            Error::NotFound(_) => "not-found",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}
