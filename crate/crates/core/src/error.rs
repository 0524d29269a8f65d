use thiserror::Error;

/// Errors raised by the geometry and fitting routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("hidden pre-activation is exactly zero (sample {sample}, layer {layer}, neuron {neuron}); resample the weights")]
    KinkTouching {
        sample: usize,
        layer: usize,
        neuron: usize,
    },

    #[error("numerically ill-conditioned system (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("enumeration cap exceeded: {size} samples, cap is {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("index set {0} is not realizable")]
    NotRealizable(String),

    #[error("duplicate entries in threshold input")]
    DuplicateEntries,

    #[error("sample vector is not sorted")]
    NotSorted,

    #[error(
        "every one of {trials} random weight draws touched a ReLU kink; the sample is pathological"
    )]
    AllDrawsKinked { trials: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
