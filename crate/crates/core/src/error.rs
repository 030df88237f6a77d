//! Crate-wide error type for geometry and evaluation failures.

use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    /// Jacobian of an immersion dropped rank at a sample point.
    #[error("immersion rank deficient at u = {u:?} (smallest singular value {sigma_min:.3e})")]
    RankDeficient { u: Vec<f64>, sigma_min: f64 },

    /// Gram-Schmidt could not complete an orthonormal frame.
    #[error("frame construction broke down at u = {u:?} (pivot {pivot:.3e})")]
    FrameBreakdown { u: Vec<f64>, pivot: f64 },

    /// A set of vectors supposed to span a plane is numerically degenerate.
    #[error("degenerate span (Gram volume {volume:.3e})")]
    DegenerateSpan { volume: f64 },

    /// Induced metric is singular at a sample point.
    #[error("induced metric degenerate at u = {u:?}")]
    MetricDegenerate { u: Vec<f64> },

    /// `I + tB` was singular or too ill-conditioned to invert.
    #[error("matrix shift I + tB is singular for t = {t}")]
    SingularShift { t: String },

    /// Clifford action applied to a 1-form with components outside the
    /// cotangent half of the octonions.
    #[error("clifford action expects a 1-form in span{{e, ie, je, ke}}; stray component {stray:.3e}")]
    NotCotangent { stray: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("unknown scenario '{name}'; known: {known}")]
    UnknownScenario { name: String, known: String },

    #[error("{0}")]
    Invalid(String),
}
