use thiserror::Error;

/// Errors produced by the phase-space toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field contains non-finite values ({context})")]
    NonFinite { context: String },

    #[error("density has negative values: min {min:.3e} below threshold {threshold:.3e}")]
    NegativeDensity { min: f64, threshold: f64 },

    #[error("state purity {purity:.6} is below the pure-state threshold")]
    ImpureState { purity: f64 },

    #[error("overlap clamp residual {residual:.3e} exceeds 1e-5; grid is under-resolved")]
    OverlapResidual { residual: f64 },

    #[error("Ermakov scaling factor collapsed to {b:.3e} at t = {time:.6} (focusing singularity)")]
    ErmakovSingularity { time: f64, b: f64 },

    #[error("rate dominance violated at time index {index}: margin {margin:.6} > 1 + 1e-3")]
    DominanceViolated { index: usize, margin: f64 },

    #[error("field magnitude at the domain boundary is {ratio:.3e} of the peak; widen the grid")]
    DomainTruncation { ratio: f64 },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
