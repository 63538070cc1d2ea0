use crate::expr::DomainError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("observer field is not normalized at {point:?}: Ω(z) = {value}")]
    ObserverInvalid { point: Vec<f64>, value: f64 },
    #[error("vector is not spatial: Ω(v) = {0:e}")]
    NotSpatial(f64),
    #[error("spatial frame is degenerate at {0:?}")]
    FrameDegenerate(Vec<f64>),
    #[error("spatial metric is singular at {point:?} (det h = {det:e})")]
    MetricSingular { point: Vec<f64>, det: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
