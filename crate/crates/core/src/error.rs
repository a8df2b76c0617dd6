use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading, validating or generating datasets and masks.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: cannot parse {cell:?} as a number")]
    NonNumeric {
        line: usize,
        column: usize,
        cell: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: mask entries must be 0 or 1, found {cell:?}")]
    BadMaskEntry {
        line: usize,
        column: usize,
        cell: String,
    },
    #[error("{what} contains no rows")]
    Empty { what: &'static str },
    #[error("view {view} has {found} samples, expected {expected}")]
    SampleCountMismatch {
        view: usize,
        expected: usize,
        found: usize,
    },
    #[error("mask has shape {rows}x{cols}, expected {n}x{l}")]
    MaskShape {
        rows: usize,
        cols: usize,
        n: usize,
        l: usize,
    },
    #[error("sample {sample} observed in no view")]
    UnobservedSample { sample: usize },
    #[error("labels file has {found} entries, expected {expected}")]
    LabelCount { expected: usize, found: usize },
    #[error("view {view}, feature {feature}, sample {sample}: observed value is not finite")]
    NonFinite {
        view: usize,
        feature: usize,
        sample: usize,
    },
    #[error("missing ratio {ratio} removes {per_view} of {n} samples from each of {l} views; at least one view per sample cannot be preserved")]
    InfeasibleRatio {
        ratio: f64,
        per_view: usize,
        n: usize,
        l: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Errors from graph construction and the simplex projection.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("neighbor count must be positive")]
    ZeroNeighbors,
    #[error("neighbor count {k} must be smaller than the node count {nodes}")]
    TooManyNeighbors { k: usize, nodes: usize },
    #[error("feature matrix has no observed columns")]
    NoColumns,
    #[error("simplex projection needs at least two coordinates when one is forbidden")]
    DegenerateSimplex,
    #[error("forbidden index {index} out of range for length {len}")]
    ForbiddenOutOfRange { index: usize, len: usize },
}

/// Errors raised by the alternating optimizer.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
    #[error("cluster count {c} exceeds {what} ({limit})")]
    TooManyClusters {
        c: usize,
        what: String,
        limit: usize,
    },
    #[error("S update undefined; the similarity step divides by lambda2, which is zero")]
    ZeroLambda2,
    #[error("recovery system for view {view} is not positive definite")]
    NotPositiveDefinite { view: usize },
    #[error("objective became non-finite at iteration {iter}")]
    NonFinite {
        iter: usize,
        state: Box<crate::solver::ModelState>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors from clustering and scoring.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("label vectors have different lengths ({pred} vs {truth})")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("label vectors are empty")]
    EmptyLabels,
    #[error("cannot form {c} clusters from {n} points")]
    TooFewPoints { n: usize, c: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
