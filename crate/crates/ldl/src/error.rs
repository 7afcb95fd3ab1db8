//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by dataset construction, training, evaluation, and I/O.
#[derive(Debug, Error)]
pub enum LdlError {
    /// A description degree is negative beyond the rounding floor.
    #[error("description degree {value} at position {index} is negative")]
    NegativeDegree { index: usize, value: f64 },

    /// Degrees do not sum to 1 within the input tolerance.
    #[error("description degrees sum to {sum}, expected 1 within 1e-6")]
    BadSum { sum: f64 },

    /// Fewer than two labels.
    #[error("label distribution needs at least 2 labels, got {c}")]
    TooShort { c: usize },

    /// Label index outside 0..c.
    #[error("label index {index} out of range for {c} labels")]
    IndexOutOfRange { index: usize, c: usize },

    /// Relevant label set is empty.
    #[error("relevant label set is empty")]
    EmptySet,

    /// Mismatched vector/matrix dimensions between operands.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// Input contains NaN or infinity.
    #[error("non-finite input: {context}")]
    NonFiniteInput { context: String },

    /// Empty test set passed to an evaluator.
    #[error("test set is empty")]
    EmptyTestSet,

    /// A ranking input is missing one of the six measures.
    #[error("missing measure {measure} for algorithm {algorithm}")]
    MissingMeasure { algorithm: String, measure: String },

    /// The scalar update equation has no finite solution for a coordinate.
    #[error("no solution for update coordinate (label {label}, feature {feature}): {reason}")]
    NoSolution {
        label: usize,
        feature: usize,
        reason: String,
    },

    /// Line search asked to move along a non-descent direction.
    #[error("search direction is not a descent direction (slope {slope})")]
    NotDescentDirection { slope: f64 },

    /// No step satisfying the strong Wolfe conditions was found.
    #[error("line search failed after {steps} trial steps")]
    LineSearchFailed { steps: usize },

    /// Quasi-Newton curvature condition violated; update skipped.
    #[error("curvature condition violated: s'u = {s_dot_u}")]
    CurvatureViolation { s_dot_u: f64 },

    /// Invalid neighbor count.
    #[error("invalid k = {k} for training set of size {n}")]
    BadK { k: usize, n: usize },

    /// Training loss became non-finite.
    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Diverged { epoch: usize, loss: f64 },

    /// All resampling weights are zero.
    #[error("total resampling weight is zero")]
    ZeroTotalWeight,

    /// A class label is absent from the resampled training set.
    #[error("class {label} is empty after resampling")]
    EmptyClass { label: usize },

    /// Class covariance is not positive definite.
    #[error("covariance for class {label} is not positive definite")]
    NotPositiveDefinite { label: usize },

    /// All mixture components of the synthetic generator vanished.
    #[error("all synthetic mixture components are zero at the given point")]
    DegenerateZero,

    /// Wrong number of grid cells passed to the renderer.
    #[error("renderer expected {expected} cells, got {got}")]
    WrongCellCount { expected: usize, got: usize },

    /// Renderer needs exactly three labels.
    #[error("renderer expected 3 labels, got {got}")]
    WrongLabelCount { got: usize },

    /// Malformed dataset or model file.
    #[error("parse error at {path}:{line}: {message}")]
    ParseError {
        path: String,
        line: usize,
        message: String,
    },

    /// A parsed record violates a dataset invariant.
    #[error("invariant violation at example {example}: {constraint}")]
    InvariantViolation { example: usize, constraint: String },

    /// Not enough examples to build the requested folds.
    #[error("need at least {folds} examples for {folds} folds, got {n}")]
    TooFewExamples { n: usize, folds: usize },

    /// Model file carries an unrecognized algorithm tag.
    #[error("unknown algorithm tag `{tag}`")]
    UnknownAlgorithmTag { tag: String },

    /// Model file version not supported.
    #[error("unsupported model file version {found}, expected {expected}")]
    VersionMismatch { found: String, expected: String },

    /// A fold-level task failed inside the cross-validation harness.
    #[error("fold {fold}: {source}")]
    FoldFailed {
        fold: usize,
        #[source]
        source: Box<LdlError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LdlError>;

impl LdlError {
    /// Attach a fold index to an error raised inside the CV harness.
    pub fn in_fold(self, fold: usize) -> Self {
        LdlError::FoldFailed {
            fold,
            source: Box::new(self),
        }
    }
}
