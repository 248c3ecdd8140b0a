use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is not in the constraint set (distance {distance:e})")]
    PointNotInSet { distance: f64 },

    #[error("rejection sampling produced {got} of {wanted} points")]
    SamplingExhausted { wanted: usize, got: usize },

    #[error("projection is not unique at the given point")]
    DegenerateProjection,

    #[error("constraint set is empty")]
    EmptySet,

    #[error("bifunction does not provide the {0} gradient")]
    MissingGradient(&'static str),

    #[error("bifunction is not flagged with F(u,u) = 0")]
    DiagonalNotZero,

    #[error("inner minimization did not reach tolerance after {iterations} iterations")]
    InnerSolveFailed { iterations: usize },

    #[error("subproblem fixed-point iteration failed: {0}")]
    SubproblemFailed(String),

    #[error("trace has no records")]
    EmptyTrace,

    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u64, limit: u64 },

    #[error("no grid point lies in the constraint set")]
    EmptyGrid,

    #[error("function returned a non-finite value")]
    NonFiniteValue,

    #[error("line-search probe left the constraint set")]
    InfeasibleSegment,
}
