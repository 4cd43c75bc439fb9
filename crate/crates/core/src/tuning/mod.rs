//! Stratified k-fold cross-validation and exhaustive grid search.

mod cv;
mod folds;
mod grid;

use thiserror::Error;

use crate::classifiers::ClassifierError;
use crate::corpus::Label;
use crate::features::FeatureError;

pub use cv::{cross_validate, Augmentation, CvReport, CvSetup, FoldOutcome, Metric};
pub use folds::{stratified_k_fold, FoldPlan};
pub use grid::{describe_params, grid_search, select_best, CandidateResult, ParamGrid, ParamSet, SearchResult};

#[derive(Debug, Error)]
pub enum TuningError {
    #[error("fold count must be at least 2, got {0}")]
    BadFoldCount(usize),
    #[error("class {label} has {count} samples, fewer than k = {k}")]
    ClassTooSmall { label: Label, count: usize, k: usize },
    #[error("invalid fold plan: {0}")]
    BadPlan(String),
    #[error("record {app_id} has no label")]
    Unlabeled { app_id: String },
    #[error("training part of fold {fold} contains a single class")]
    SingleClassFold { fold: usize },
    #[error("feature extraction failed in fold {fold}: {source}")]
    Features { fold: usize, source: FeatureError },
    #[error("training failed in fold {fold}: {source}")]
    Training { fold: usize, source: ClassifierError },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("candidate #{index} ({params}) failed: {source}")]
    Candidate {
        index: usize,
        params: String,
        source: Box<TuningError>,
    },
    #[error("final model training failed: {0}")]
    FinalModel(String),
}
