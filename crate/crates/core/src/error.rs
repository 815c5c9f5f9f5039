use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    GridSize(usize),
    #[error("domain length must be positive and finite, got {0}")]
    GridLength(f64),
    #[error("field has {got} samples but the grid has {expected}")]
    SampleCount { expected: usize, got: usize },
    #[error("field contains a non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("projector scale {scale} is below the frequency resolution {resolution}")]
    DegenerateProjector { scale: f64, resolution: f64 },
    #[error("invalid projector: {0}")]
    InvalidProjector(String),
    #[error("frequency {0} is not on the grid's frequency lattice")]
    OffLattice(f64),
    #[error("scale factor {0} is not a power of two")]
    ScaleFactor(f64),
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("time {0} is not a saved frame of the trajectory")]
    UnsavedTime(f64),
    #[error("trajectory has too few frames: {0}")]
    InsufficientFrames(String),
    #[error("invalid exponent: {0}")]
    Exponent(String),
    #[error("field has zero mass")]
    ZeroField,
    #[error("estimate only holds for the defocusing equation")]
    Focusing,
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
