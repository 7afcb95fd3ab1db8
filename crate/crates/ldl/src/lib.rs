//! Label distribution learning: algorithms that map feature vectors to
//! per-label description degrees summing to 1.
//!
//! The crate provides:
//!
//! - domain types and the shared [`Predictor`] contract ([`data`]);
//! - five learners: a problem-transformation Gaussian Bayes classifier
//!   ([`transform`]), distribution-averaging k-nearest neighbors
//!   ([`neighbors`]), a softmax-output backpropagation network ([`neural`]),
//!   and two maximum-entropy trainers — improved iterative scaling and
//!   BFGS with a strong-Wolfe line search ([`maxent`]);
//! - the six evaluation measures and ranked reports ([`measures`]);
//! - a deterministic synthetic benchmark with RGB manifold rendering
//!   ([`datagen`]);
//! - dataset/model file formats and a nested cross-validation harness
//!   ([`io`]).

pub mod data;
pub mod datagen;
pub mod error;
pub mod io;
pub mod learners;
pub mod maxent;
pub mod measures;
pub mod neighbors;
pub mod neural;
pub mod transform;

pub use data::{
    kl_objective, FeatureVector, LabelDistribution, LdlDataset, Predictor, Standardizer,
};
pub use error::{LdlError, Result};
pub use measures::{evaluate_all, rank_report, EvaluationReport, MeasureId, MeasureVector};
