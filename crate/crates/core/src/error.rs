use thiserror::Error;

use crate::data::Arm;

pub type Result<T, E = NphError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NphError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("{0} arm has no subjects")]
    EmptyArm(Arm),
    #[error("no events in dataset (all subjects censored)")]
    NoEvents,
    #[error("subject {index} has negative or non-finite time {time}")]
    NegativeTime { index: usize, time: f64 },
    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("total variance is zero; the two arms are never jointly at risk at an event time")]
    DegenerateVariance,
    #[error("all weights are zero at the observed event times")]
    AllZeroWeights,
    #[error("Newton-Raphson did not converge after {iterations} iterations (last beta = {last_beta}): {reason}")]
    NonConvergence {
        iterations: usize,
        last_beta: f64,
        reason: &'static str,
    },
    #[error("value {value} is outside the attainable range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("argument {x} is too close to 1 for reliable evaluation")]
    PrecisionLoss { x: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl NphError {
    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        NphError::Domain { what, value, expected }
    }
}
