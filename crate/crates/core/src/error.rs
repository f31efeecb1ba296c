use thiserror::Error;

use crate::pipeline::FlattenTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a structural requirement (monotone tables, radii, grids).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("degenerate trial function: zero weighted norm")]
    DegenerateTrial,

    /// Two requested eigenvalues are not separated at the working grid.
    #[error("grid cannot resolve eigenvalue {index}: gap {gap:e} below resolution at lambda {lambda:e}")]
    Resolution { index: usize, gap: f64, lambda: f64 },

    #[error("oracle error: {0}")]
    Oracle(String),

    /// An internal postcondition failed; indicates a bug upstream of the check.
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("pipeline invariant violated at stage {stage}: {reason}")]
    Pipeline { stage: usize, reason: String },

    #[error("flattening did not terminate within {} stages (stalled at mu = {stalled_mu})", trace.mu_chain.len())]
    NonTermination {
        stalled_mu: f64,
        trace: Box<FlattenTrace>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
