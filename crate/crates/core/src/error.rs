use thiserror::Error;

/// Errors raised by grid construction, field validation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} values for this grid, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("field mean {0:e} is not zero")]
    NonZeroMean(f64),
    #[error("density minimum {min:e} is below the positivity floor")]
    Positivity { min: f64 },
    #[error("density mass {0} differs from 1")]
    Mass(f64),
    #[error("gauge condition violated by {0:e}")]
    Gauge(f64),
    #[error("wave function norm {0} differs from 1")]
    Norm(f64),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("weighted Poisson solve stalled at relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("spectral tail carries {fraction:e} of the L2 energy (limit {limit:e})")]
    SpectralBlowup { fraction: f64, limit: f64 },
    #[error("wave function modulus {0:e} is too small")]
    VanishingAmplitude(f64),
    #[error("phase winds by {winding} turns along axis {axis}")]
    Winding { axis: usize, winding: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("requires a {expected}-dimensional grid, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
