//! Dataset and model file formats plus the nested cross-validation harness.

mod cv;
mod dataset;
mod model;

pub use cv::{make_cv_plan, nested_cv, CvLearner, CvOutcome, CvPlan, FoldAudit};
pub use dataset::{read_dataset, write_dataset};
pub use model::{load_model, save_model, Model, ModelKind};
