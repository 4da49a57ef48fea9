use thiserror::Error;

/// Errors raised by the geometric and algebraic kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The squashing function k(r) is singular at r = r_inf.
    #[error("squashing pole: r = {r} is within the guard band of r_inf = {r_inf}")]
    SquashingPole { r: f64, r_inf: f64 },

    /// |f(r)| fell below the horizon guard; g_rr is not usable.
    #[error("degenerate metric at r = {r}: |f(r)| = {lapse:e} is inside the horizon guard band")]
    DegenerateMetric { r: f64, lapse: f64 },

    /// theta too close to 0 or pi; the phi/psi block is singular there.
    #[error("coordinate singularity at theta = {theta}")]
    CoordinateSingularity { theta: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("not a Noether symmetry: residual {residual:e} exceeds {tolerance:e}")]
    NotNoether { residual: f64, tolerance: f64 },

    #[error("linearly dependent basis (rank {rank} < {len})")]
    DependentBasis { rank: usize, len: usize },

    #[error("zero algebra element cannot be classified")]
    ZeroElement,
}

pub type Result<T> = std::result::Result<T, Error>;
