use rayon::prelude::*;
use serde::Serialize;

use super::{compute_metrics, EvaluationError, Metrics};
use crate::classifiers::Learner;
use crate::features::{FeatureConfig, PreparedRecord};
use crate::tuning::{cross_validate, CvSetup, FoldPlan};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub label: String,
    pub config: FeatureConfig,
    pub metrics: Metrics,
    pub cv_mean: f64,
    pub cv_std: f64,
}

/// Permissions only, text only, and hybrid, in that order.
pub fn default_ablation_configs() -> Vec<FeatureConfig> {
    vec![
        FeatureConfig::PERMISSIONS_ONLY,
        FeatureConfig::TEXT_ONLY,
        FeatureConfig::HYBRID,
    ]
}

/// Cross-validates `learner` once per feature configuration on the same
/// folds. Rows follow the order of `configs`.
pub fn run_ablation<L: Learner>(
    learner: &L,
    data: &[PreparedRecord],
    configs: &[FeatureConfig],
    plan: &FoldPlan,
    setup: &CvSetup,
) -> Result<Vec<AblationRow>, EvaluationError> {
    configs
        .par_iter()
        .map(|&config| {
            let setup = CvSetup {
                feature_config: config,
                ..*setup
            };
            let report = cross_validate(learner, data, plan, &setup).map_err(|source| EvaluationError::Config {
                config: config.label(),
                source,
            })?;
            Ok(AblationRow {
                label: config.label(),
                config,
                metrics: compute_metrics(&report.confusion())?,
                cv_mean: report.mean,
                cv_std: report.std,
            })
        })
        .collect()
}
