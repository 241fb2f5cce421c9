use thiserror::Error;

/// Errors raised by metric, fitting and generator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("empty evaluation region: the mask selects no voxels")]
    EmptyRegion,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("score {value} at index {index} is not a finite value in [0, 1]")]
    ScoreOutOfRange { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("class scores of point {index} sum to {sum}, expected 1")]
    RowSum { index: usize, sum: f64 },
    #[error("labels contain a single class; the likelihood has no finite maximiser")]
    DegenerateLabels,
    #[error("input is constant; correlation is undefined")]
    ConstantInput,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("lesion radius {radius} does not fit in grid {dims:?}")]
    RadiusExceedsGrid { radius: f64, dims: [usize; 3] },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
