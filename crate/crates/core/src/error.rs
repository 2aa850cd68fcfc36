// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("invalid qubit count {0} (expected 1..=12)")]
    InvalidQubitCount(usize),

    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("unsupported Trotter order {0} (use 1, 2 or an even order >= 4)")]
    UnsupportedOrder(usize),

    #[error("invalid evolution method: {0}")]
    InvalidMethod(String),

    #[error("tape/method mismatch: {0}")]
    MethodMismatch(&'static str),

    #[error("class {0} has no samples")]
    EmptyClass(usize),

    #[error("label {label} outside 0..{k}")]
    UnknownLabel { label: usize, k: usize },

    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("backward called before forward on layer {0}")]
    BackwardWithoutForward(usize),

    #[error("non-finite gradient for parameter `{0}`")]
    NonFiniteGradient(String),

    #[error("invalid optimizer hyperparameter: {0}")]
    InvalidOptimizer(String),

    #[error("{path}: bad format at byte {offset}: {msg}")]
    Format {
        path: PathBuf,
        offset: u64,
        msg: String,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("class {0} not present in dataset")]
    ClassAbsent(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("non-finite loss at epoch {epoch}, batch {batch}; dump written to {dump}")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        dump: PathBuf,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QubitOutOfRange { .. } => "qubit_out_of_range",
            Error::InvalidQubitCount(_) => "invalid_qubit_count",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::DimensionMismatch(..) => "dimension_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::UnsupportedOrder(_) => "unsupported_order",
            Error::InvalidMethod(_) => "invalid_method",
            Error::MethodMismatch(_) => "method_mismatch",
            Error::EmptyClass(_) => "empty_class",
            Error::UnknownLabel { .. } => "unknown_label",
            Error::TooFewClasses(_) => "too_few_classes",
            Error::Shape(_) => "shape",
            Error::BackwardWithoutForward(_) => "backward_without_forward",
            Error::NonFiniteGradient(_) => "non_finite_gradient",
            Error::InvalidOptimizer(_) => "invalid_optimizer",
            Error::Format { .. } => "format",
            Error::Parse { .. } => "parse",
            Error::Degenerate(_) => "degenerate",
            Error::ClassAbsent(_) => "class_absent",
            Error::Config(_) => "config",
            Error::NonFiniteLoss { .. } => "non_finite_loss",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
