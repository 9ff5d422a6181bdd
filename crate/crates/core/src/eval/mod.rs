//! Scoring: target tables, leave-one-out SVM classification, the voicing
//! score, the random-projection baseline and frame-level trajectory metrics.

mod loo;
mod metrics;
mod projection;
mod svm;
mod targets;
mod voicing;

pub use loo::{loo_classification_accuracy, shuffle_labels, LooReport, SetAccuracy};
pub use metrics::{trajectory_metrics, TrajectoryMetrics};
pub use projection::RandomProjection;
pub use svm::{train_linear_svm, LinearSvmModel, SvmConfig};
pub use targets::{build_targets, preprocess, Preprocess, TargetRow, TargetTable};
pub use voicing::{voicing_score, UnitScore, VoicingReport, VoicingSpec};
