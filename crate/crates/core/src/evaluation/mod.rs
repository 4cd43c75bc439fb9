//! Confusion matrices, metrics, ablation, feature importance and reports.

mod ablation;
mod importance;
mod metrics;
mod report;

use thiserror::Error;

use crate::classifiers::Learner;
use crate::features::PreparedRecord;
use crate::tuning::{cross_validate, CvReport, CvSetup, FoldPlan, TuningError};

pub use ablation::{default_ablation_configs, run_ablation, AblationRow};
pub use importance::{rank_feature_importance, RankedFeature};
pub use metrics::{compute_metrics, confusion_from_predictions, ConfusionMatrix, Degenerate, Metrics};
pub use report::{
    ablation_table, importance_table, metrics_table, write_ablation_csv, write_importance_csv, write_metrics_csv,
    MetricsRow,
};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("no predictions to evaluate")]
    Empty,
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("feature importance is not available for {0}")]
    Unsupported(String),
    #[error("configuration `{config}` failed: {source}")]
    Config { config: String, source: TuningError },
    #[error(transparent)]
    Tuning(#[from] TuningError),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write report: {0}")]
    Csv(#[from] csv::Error),
}

/// Cross-validated evaluation of one model.
#[derive(Debug, Clone)]
pub struct ModelEvaluation {
    pub name: String,
    pub report: CvReport,
    /// Aggregated over all out-of-fold predictions.
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

impl ModelEvaluation {
    pub fn row(&self) -> MetricsRow {
        MetricsRow {
            model: self.name.clone(),
            metrics: self.metrics,
            confusion: self.confusion,
            cv_mean: self.report.mean,
            cv_std: self.report.std,
        }
    }
}

pub fn evaluate<L: Learner>(
    name: &str,
    learner: &L,
    data: &[PreparedRecord],
    plan: &FoldPlan,
    setup: &CvSetup,
) -> Result<ModelEvaluation, EvaluationError> {
    let report = cross_validate(learner, data, plan, setup)?;
    let confusion = report.confusion();
    let metrics = compute_metrics(&confusion)?;
    Ok(ModelEvaluation {
        name: name.to_string(),
        report,
        confusion,
        metrics,
    })
}
