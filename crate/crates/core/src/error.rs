use thiserror::Error;

use crate::types::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid coordinate at point {point}, axis {axis}")]
    InvalidCoordinate { point: usize, axis: usize },
    #[error("invalid value at index {0}")]
    InvalidValue(usize),
    #[error("inconsistent dimensions: {0}")]
    Shape(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(Violation),
    #[error("no training mass")]
    NoTrainingMass,
    #[error("invalid bin count {0}, need at least 2")]
    InvalidBinCount(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training prefix too short: need {needed} frames, got {got}")]
    TrainingPrefixTooShort { needed: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
