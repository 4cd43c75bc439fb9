use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FoldPlan, TuningError};
use crate::classifiers::{Learner, Prediction, Predictor};
use crate::corpus::{augment_synonyms, AppRecord, Label, SynonymMap};
use crate::evaluation::{compute_metrics, ConfusionMatrix};
use crate::features::{FeatureConfig, FeaturePipeline, PreparedRecord, SparseVec};
use crate::textprep::TextPipeline;

/// Model selection score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Accuracy,
    /// F1 of the `Official` class.
    F1,
}

impl Metric {
    pub fn score(&self, cm: &ConfusionMatrix) -> f64 {
        match compute_metrics(cm) {
            Ok(m) => match self {
                Metric::Accuracy => m.accuracy,
                Metric::F1 => m.f1,
            },
            Err(_) => 0.0,
        }
    }
}

/// Synonym augmentation of training folds.
#[derive(Debug, Clone)]
pub struct Augmentation {
    pub synonyms: SynonymMap,
    pub rate: f64,
    pub copies: usize,
    /// Augment only `Official` records (the minority class in raw crawls).
    pub official_only: bool,
    pub seed: u64,
}

impl Augmentation {
    /// Returns `training` plus augmented copies of the eligible records.
    pub fn apply(&self, training: &[PreparedRecord], text: &TextPipeline) -> Vec<PreparedRecord> {
        let eligible: Vec<AppRecord> = training
            .iter()
            .filter(|p| !self.official_only || p.record.label == Some(Label::Official))
            .map(|p| p.record.clone())
            .collect();
        let augmented = augment_synonyms(
            &eligible,
            &self.synonyms,
            self.rate,
            self.seed,
            &text.stoplist,
            self.copies,
        );
        let mut out = training.to_vec();
        out.extend(
            augmented
                .into_iter()
                .skip(eligible.len())
                .map(|r| PreparedRecord::new(r, text)),
        );
        out
    }
}

/// Everything besides the learner that a CV run needs.
#[derive(Debug, Clone, Copy)]
pub struct CvSetup<'a> {
    pub feature_config: FeatureConfig,
    pub watchlist: &'a [String],
    pub text: &'a TextPipeline,
    pub augmentation: Option<&'a Augmentation>,
    pub metric: Metric,
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub score: f64,
    pub confusion: ConfusionMatrix,
    /// Pipeline fitted on this fold's training part.
    pub pipeline: FeaturePipeline,
    pub n_train: usize,
}

#[derive(Debug, Clone)]
pub struct CvReport {
    pub folds: Vec<FoldOutcome>,
    pub mean: f64,
    /// Population standard deviation of the fold scores.
    pub std: f64,
    /// Out-of-fold prediction for every sample, in input order.
    pub predictions: Vec<Prediction>,
}

impl CvReport {
    pub fn fold_scores(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.score).collect()
    }

    /// Confusion matrix over all out-of-fold predictions.
    pub fn confusion(&self) -> ConfusionMatrix {
        self.folds
            .iter()
            .fold(ConfusionMatrix::default(), |acc, f| acc.merge(&f.confusion))
    }
}

fn labels_of(data: &[PreparedRecord]) -> Result<Vec<Label>, TuningError> {
    data.iter()
        .map(|p| {
            p.record.label.ok_or_else(|| TuningError::Unlabeled {
                app_id: p.record.app_id.clone(),
            })
        })
        .collect()
}

fn mean_std(scores: &[f64]) -> (f64, f64) {
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Fits the feature pipeline and the learner on each fold's training part
/// only, then scores the held-out part.
pub fn cross_validate<L: Learner>(
    learner: &L,
    data: &[PreparedRecord],
    plan: &FoldPlan,
    setup: &CvSetup,
) -> Result<CvReport, TuningError> {
    if plan.len() != data.len() {
        return Err(TuningError::BadPlan(format!(
            "plan covers {} samples, data has {}",
            plan.len(),
            data.len()
        )));
    }
    let labels = labels_of(data)?;
    let results: Vec<(FoldOutcome, Vec<(usize, Prediction)>)> = (0..plan.k)
        .into_par_iter()
        .map(|fold| run_fold(learner, data, &labels, plan, fold, setup))
        .collect::<Result<_, _>>()?;

    let mut predictions = vec![None; data.len()];
    let mut folds = Vec::with_capacity(plan.k);
    for (outcome, preds) in results {
        for (i, p) in preds {
            predictions[i] = Some(p);
        }
        folds.push(outcome);
    }
    let (mean, std) = mean_std(&folds.iter().map(|f| f.score).collect::<Vec<_>>());
    Ok(CvReport {
        folds,
        mean,
        std,
        predictions: predictions
            .into_iter()
            .map(|p| p.expect("every sample is held out once"))
            .collect(),
    })
}

fn run_fold<L: Learner>(
    learner: &L,
    data: &[PreparedRecord],
    labels: &[Label],
    plan: &FoldPlan,
    fold: usize,
    setup: &CvSetup,
) -> Result<(FoldOutcome, Vec<(usize, Prediction)>), TuningError> {
    let (train_idx, test_idx) = plan.split(fold);
    if test_idx.is_empty() {
        return Err(TuningError::BadPlan(format!("fold {fold} is empty")));
    }
    for label in Label::ALL {
        if !train_idx.iter().any(|&i| labels[i] == label) {
            return Err(TuningError::SingleClassFold { fold });
        }
    }
    let mut training: Vec<PreparedRecord> = train_idx.iter().map(|&i| data[i].clone()).collect();
    if let Some(aug) = setup.augmentation {
        training = aug.apply(&training, setup.text);
    }
    let pipeline = FeaturePipeline::fit(&training, setup.watchlist, setup.feature_config)
        .map_err(|source| TuningError::Features { fold, source })?;
    let x: Vec<SparseVec> = training.iter().map(|p| pipeline.transform(p)).collect();
    let y: Vec<Label> = training
        .iter()
        .map(|p| p.record.label.expect("labels checked"))
        .collect();
    let model = learner
        .fit(&x, &y)
        .map_err(|source| TuningError::Training { fold, source })?;

    let mut confusion = ConfusionMatrix::default();
    let mut preds = Vec::with_capacity(test_idx.len());
    for &i in &test_idx {
        let p = model.predict(&pipeline.transform(&data[i]));
        confusion.record(labels[i], p.label);
        preds.push((i, p));
    }
    Ok((
        FoldOutcome {
            fold,
            score: setup.metric.score(&confusion),
            confusion,
            n_train: training.len(),
            pipeline,
        },
        preds,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ClassifierError, ModelSpec};
    use crate::corpus::{generate_synthetic, GeneratorConfig, DEFAULT_WATCHLIST};
    use crate::tuning::stratified_k_fold;

    struct Constant(Label);

    impl Predictor for Constant {
        fn predict(&self, _: &SparseVec) -> Prediction {
            Prediction {
                label: self.0,
                confidence: 1.0,
                score: 0.0,
            }
        }
    }

    impl Learner for Constant {
        type Model = Constant;
        fn fit(&self, _: &[SparseVec], _: &[Label]) -> Result<Constant, ClassifierError> {
            Ok(Constant(self.0))
        }
    }

    fn data(n: usize) -> Vec<PreparedRecord> {
        let config = GeneratorConfig {
            n_official: n,
            n_unofficial: n,
            ..GeneratorConfig::default()
        };
        PreparedRecord::prepare_all(generate_synthetic(&config).unwrap(), &TextPipeline::default())
    }

    fn watchlist() -> Vec<String> {
        DEFAULT_WATCHLIST.iter().map(|s| s.to_string()).collect()
    }

    fn plan(data: &[PreparedRecord], k: usize) -> FoldPlan {
        stratified_k_fold(&labels_of(data).unwrap(), k, 42).unwrap()
    }

    #[test]
    fn constant_classifier_scores_half() {
        let data = data(50);
        let (wl, text) = (watchlist(), TextPipeline::default());
        let setup = CvSetup {
            feature_config: FeatureConfig::HYBRID,
            watchlist: &wl,
            text: &text,
            augmentation: None,
            metric: Metric::Accuracy,
        };
        let report = cross_validate(&Constant(Label::Unofficial), &data, &plan(&data, 10), &setup).unwrap();
        assert!(report.fold_scores().iter().all(|&s| s == 0.5));
        assert_eq!(report.mean, 0.5);
        assert_eq!(report.std, 0.0);
        assert_eq!(report.confusion().total(), 100);
    }

    #[test]
    fn separable_data_scores_one() {
        // permissions-only view where READ_SMS alone marks the class
        let mut data = data(20);
        for p in data.iter_mut() {
            p.record.permissions.remove("READ_SMS");
            if p.record.label == Some(Label::Unofficial) {
                p.record.permissions.insert("READ_SMS".into());
            }
        }
        let (wl, text) = (watchlist(), TextPipeline::default());
        let setup = CvSetup {
            feature_config: FeatureConfig::PERMISSIONS_ONLY,
            watchlist: &wl,
            text: &text,
            augmentation: None,
            metric: Metric::Accuracy,
        };
        let report = cross_validate(&ModelSpec::reference_svm(), &data, &plan(&data, 5), &setup).unwrap();
        assert_eq!(report.mean, 1.0);
    }

    #[test]
    fn held_out_terms_never_reach_fold_vocabulary() {
        let mut data = data(30);
        let plan = plan(&data, 10);
        for (i, p) in data.iter_mut().enumerate() {
            let sentinel = format!("zzsentinel{}", plan.assignments[i]);
            p.tokens.push(sentinel);
        }
        let (wl, text) = (watchlist(), TextPipeline::default());
        let setup = CvSetup {
            feature_config: FeatureConfig::HYBRID,
            watchlist: &wl,
            text: &text,
            augmentation: None,
            metric: Metric::Accuracy,
        };
        let report = cross_validate(&ModelSpec::reference_nb(), &data, &plan, &setup).unwrap();
        for fold in &report.folds {
            let vocab = &fold.pipeline.tfidf;
            assert!(!vocab.contains(&format!("zzsentinel{}", fold.fold)));
            for other in (0..10).filter(|&f| f != fold.fold) {
                assert!(vocab.contains(&format!("zzsentinel{other}")));
            }
        }
    }

    #[test]
    fn augmentation_only_grows_training_folds() {
        let data = data(20);
        let plan = plan(&data, 4);
        let (wl, text) = (watchlist(), TextPipeline::default());
        let aug = Augmentation {
            synonyms: SynonymMap::bundled(),
            rate: 0.3,
            copies: 1,
            official_only: true,
            seed: 7,
        };
        let mut setup = CvSetup {
            feature_config: FeatureConfig::HYBRID,
            watchlist: &wl,
            text: &text,
            augmentation: Some(&aug),
            metric: Metric::Accuracy,
        };
        let with = cross_validate(&ModelSpec::reference_nb(), &data, &plan, &setup).unwrap();
        setup.augmentation = None;
        let without = cross_validate(&ModelSpec::reference_nb(), &data, &plan, &setup).unwrap();
        // each training part holds 15 official records, each copied once
        for (a, b) in with.folds.iter().zip(&without.folds) {
            assert_eq!(a.n_train, b.n_train + 15);
            assert_eq!(a.confusion.total(), b.confusion.total());
        }
    }

    #[test]
    fn repeatable_and_order_free() {
        let data = data(25);
        let plan = plan(&data, 5);
        let (wl, text) = (watchlist(), TextPipeline::default());
        let setup = CvSetup {
            feature_config: FeatureConfig::HYBRID,
            watchlist: &wl,
            text: &text,
            augmentation: None,
            metric: Metric::F1,
        };
        let spec = ModelSpec::reference_rf().with_seed(3);
        let a = cross_validate(&spec, &data, &plan, &setup).unwrap();
        let b = cross_validate(&spec, &data, &plan, &setup).unwrap();
        assert_eq!(a.fold_scores(), b.fold_scores());
        assert_eq!(a.predictions, b.predictions);
    }

    #[test]
    fn single_class_training_fold_rejected() {
        let data = data(10);
        let assignments: Vec<usize> = data
            .iter()
            .map(|p| if p.record.label == Some(Label::Official) { 0 } else { 1 })
            .collect();
        let plan = FoldPlan::from_assignments(2, 0, assignments).unwrap();
        let (wl, text) = (watchlist(), TextPipeline::default());
        let setup = CvSetup {
            feature_config: FeatureConfig::HYBRID,
            watchlist: &wl,
            text: &text,
            augmentation: None,
            metric: Metric::Accuracy,
        };
        assert!(matches!(
            cross_validate(&ModelSpec::reference_nb(), &data, &plan, &setup),
            Err(TuningError::SingleClassFold { .. })
        ));
    }
}
