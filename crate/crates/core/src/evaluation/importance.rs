use serde::Serialize;

use super::EvaluationError;
use crate::classifiers::{rf_feature_importance, Classifier, Kernel, TrainedModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedFeature {
    pub feature: String,
    pub weight: f64,
}

/// Normalized per-feature weights, highest first (ties in column order).
///
/// RF uses impurity importance, NB the absolute log-likelihood ratio
/// between the classes, linear SVM the absolute primal weights. Non-linear
/// SVM kernels have no per-feature weights.
pub fn rank_feature_importance(model: &TrainedModel) -> Result<Vec<RankedFeature>, EvaluationError> {
    let names = model.pipeline.feature_names();
    let mut weights = match &model.model {
        Classifier::Rf(rf) => rf_feature_importance(rf),
        Classifier::Nb(nb) => nb.log_likelihood[1]
            .iter()
            .zip(&nb.log_likelihood[0])
            .map(|(u, o)| (u - o).abs())
            .collect(),
        Classifier::Svm(svm) => match svm.kernel {
            Kernel::Linear => svm.linear_weights(names.len()).iter().map(|w| w.abs()).collect(),
            other => {
                return Err(EvaluationError::Unsupported(format!(
                    "SVM with {} kernel",
                    other.name()
                )))
            }
        },
    };
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    let mut ranked: Vec<RankedFeature> = names
        .into_iter()
        .zip(weights)
        .map(|(feature, weight)| RankedFeature { feature, weight })
        .collect();
    ranked.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{Criterion, GammaSpec, KernelKind, ModelSpec};
    use crate::corpus::{generate_synthetic, GeneratorConfig, Label, DEFAULT_WATCHLIST};
    use crate::features::{FeatureConfig, PreparedRecord};
    use crate::textprep::TextPipeline;

    fn data() -> Vec<PreparedRecord> {
        let config = GeneratorConfig {
            n_official: 40,
            n_unofficial: 40,
            ..GeneratorConfig::default()
        };
        PreparedRecord::prepare_all(generate_synthetic(&config).unwrap(), &TextPipeline::default())
    }

    fn watchlist() -> Vec<String> {
        DEFAULT_WATCHLIST.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_discriminating_permission_ranks_first() {
        let mut data = data();
        for p in data.iter_mut() {
            p.record.permissions.clear();
            if p.record.label == Some(Label::Unofficial) {
                p.record.permissions.insert("READ_PHONE_STATE".into());
            }
        }
        let spec = ModelSpec::rf(20, Some(5), Criterion::Gini).with_seed(1);
        let model = TrainedModel::train(&spec, &data, &watchlist(), FeatureConfig::PERMISSIONS_ONLY).unwrap();
        let ranked = rank_feature_importance(&model).unwrap();
        assert_eq!(ranked[0].feature, "READ_PHONE_STATE");
        assert_eq!(ranked[0].weight, 1.0);
    }

    #[test]
    fn weights_normalized_for_supported_models() {
        let data = data();
        for spec in [
            ModelSpec::reference_nb(),
            ModelSpec::reference_rf(),
            ModelSpec::svm(KernelKind::Linear, 1.0, GammaSpec::Value(0.1)),
        ] {
            let model = TrainedModel::train(&spec, &data, &watchlist(), FeatureConfig::HYBRID).unwrap();
            let ranked = rank_feature_importance(&model).unwrap();
            assert_eq!(ranked.len(), model.pipeline.width());
            assert!((ranked.iter().map(|r| r.weight).sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(ranked.windows(2).all(|w| w[0].weight >= w[1].weight));
        }
    }

    #[test]
    fn nonlinear_svm_unsupported() {
        let model = TrainedModel::train(
            &ModelSpec::reference_svm(),
            &data(),
            &watchlist(),
            FeatureConfig::HYBRID,
        )
        .unwrap();
        assert!(matches!(
            rank_feature_importance(&model),
            Err(EvaluationError::Unsupported(_))
        ));
    }
}
