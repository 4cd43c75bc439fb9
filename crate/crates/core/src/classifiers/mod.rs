//! Naive Bayes, random forest and SVM classifiers, plus the model file.

mod forest;
mod kernel;
mod model;
mod nb;
mod svm;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::features::SparseVec;

pub use forest::{predict_rf, rf_feature_importance, train_rf, RfModel, RfParams};
pub use kernel::{kernel_eval, kernel_matrix, Kernel};
pub use model::{
    load_model, save_model, Explanation, FeatureContribution, ModelFileError, TrainError, TrainedModel, FORMAT_VERSION,
};
pub use nb::{predict_nb, train_nb, NbModel};
pub use svm::{predict_svm, train_svm_smo, train_svm_smo_detailed, SmoOutcome, SmoParams, SvmModel};
pub use tree::{impurity, Columns, Criterion, DecisionTree, TreeNode, TreeParams};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("training data has no {0} samples; both classes are required")]
    MissingClass(Label),
    #[error("training data is empty")]
    EmptyTrainingSet,
    #[error("{samples} samples but {labels} labels")]
    LengthMismatch { samples: usize, labels: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative feature value {value} at row {row}, column {column}")]
    NegativeFeature { row: usize, column: usize, value: f64 },
    #[error("SMO did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    NonConvergence { iterations: usize, violation: f64 },
}

/// Checks shapes and class coverage; returns the shared dimension.
pub(crate) fn check_training_set(x: &[SparseVec], y: &[Label]) -> Result<usize, ClassifierError> {
    if x.len() != y.len() {
        return Err(ClassifierError::LengthMismatch {
            samples: x.len(),
            labels: y.len(),
        });
    }
    let Some(first) = x.first() else {
        return Err(ClassifierError::EmptyTrainingSet);
    };
    if let Some(bad) = x.iter().find(|r| r.dim != first.dim) {
        return Err(ClassifierError::DimensionMismatch {
            expected: first.dim,
            found: bad.dim,
        });
    }
    for label in Label::ALL {
        if !y.contains(&label) {
            return Err(ClassifierError::MissingClass(label));
        }
    }
    Ok(first.dim)
}

/// One prediction. `score` is signed evidence for `Unofficial`: the log
/// posterior ratio for NB, the mean leaf margin for RF, the decision value
/// for SVM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub confidence: f64,
    pub score: f64,
}

pub trait Predictor {
    fn predict(&self, x: &SparseVec) -> Prediction;
}

/// Something that can be fit on a labeled feature matrix.
pub trait Learner: Sync {
    type Model: Predictor + Send;
    fn fit(&self, x: &[SparseVec], y: &[Label]) -> Result<Self::Model, ClassifierError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaRule {
    /// `1 / (d * var(X))`
    Scale,
    /// `1 / d`
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Rule(GammaRule),
    Value(f64),
}

impl GammaSpec {
    /// Resolves against a training matrix. Variance is taken over every
    /// entry of the dense matrix.
    pub fn resolve(&self, x: &[SparseVec]) -> f64 {
        let d = x.first().map_or(1, |r| r.dim).max(1) as f64;
        match *self {
            GammaSpec::Value(g) => g,
            GammaSpec::Rule(GammaRule::Auto) => 1.0 / d,
            GammaSpec::Rule(GammaRule::Scale) => {
                let count = x.len() as f64 * d;
                let sum: f64 = x.iter().flat_map(|r| r.values.iter()).sum();
                let sq: f64 = x.iter().map(SparseVec::squared_norm).sum();
                let mean = sum / count;
                let var = sq / count - mean * mean;
                if var > 0.0 {
                    1.0 / (d * var)
                } else {
                    1.0 / d
                }
            }
        }
    }
}

fn default_gamma() -> GammaSpec {
    GammaSpec::Rule(GammaRule::Scale)
}
fn default_degree() -> u32 {
    3
}
fn default_coef0() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-3
}
fn default_max_passes() -> usize {
    10
}

/// Untrained model family plus hyperparameters. Field names double as the
/// parameter names accepted by the grid search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Nb {
        alpha: f64,
    },
    Rf {
        n_estimators: usize,
        max_depth: Option<usize>,
        criterion: Criterion,
        #[serde(default)]
        seed: u64,
    },
    Svm {
        kernel: KernelKind,
        #[serde(rename = "C")]
        c: f64,
        #[serde(default = "default_gamma")]
        gamma: GammaSpec,
        #[serde(default = "default_degree")]
        degree: u32,
        #[serde(default = "default_coef0")]
        coef0: f64,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_max_passes")]
        max_passes: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl ModelSpec {
    pub fn nb(alpha: f64) -> Self {
        ModelSpec::Nb { alpha }
    }

    pub fn rf(n_estimators: usize, max_depth: Option<usize>, criterion: Criterion) -> Self {
        ModelSpec::Rf {
            n_estimators,
            max_depth,
            criterion,
            seed: 0,
        }
    }

    pub fn svm(kernel: KernelKind, c: f64, gamma: GammaSpec) -> Self {
        ModelSpec::Svm {
            kernel,
            c,
            gamma,
            degree: default_degree(),
            coef0: default_coef0(),
            tol: default_tol(),
            max_passes: default_max_passes(),
            seed: 0,
        }
    }

    /// Tuned settings reported for the reference study.
    pub fn reference_svm() -> Self {
        Self::svm(KernelKind::Rbf, 10.0, GammaSpec::Value(0.1))
    }

    pub fn reference_rf() -> Self {
        Self::rf(100, Some(20), Criterion::Entropy)
    }

    pub fn reference_nb() -> Self {
        Self::nb(0.5)
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Nb { .. } => "nb",
            ModelSpec::Rf { .. } => "rf",
            ModelSpec::Svm { .. } => "svm",
        }
    }

    pub fn display_name(&self) -> String {
        match self {
            ModelSpec::Nb { .. } => "Naive Bayes".into(),
            ModelSpec::Rf { .. } => "Random Forest".into(),
            ModelSpec::Svm { kernel, .. } => format!("SVM ({kernel:?})"),
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self {
            ModelSpec::Nb { .. } => {}
            ModelSpec::Rf { seed, .. } | ModelSpec::Svm { seed, .. } => *seed = new_seed,
        }
        self
    }

    /// Returns a copy with one named parameter replaced. Names follow the
    /// serialized field names (`C`, `gamma`, `kernel`, `alpha`, ...).
    pub fn with_param(&self, name: &str, value: &serde_json::Value) -> Result<Self, ClassifierError> {
        let mut obj = serde_json::to_value(self).expect("model spec serializes");
        let map = obj.as_object_mut().expect("model spec is an object");
        if name == "type" || !map.contains_key(name) {
            return Err(ClassifierError::InvalidParam(format!(
                "unknown parameter `{name}` for {}",
                self.family()
            )));
        }
        map.insert(name.to_string(), value.clone());
        serde_json::from_value(obj)
            .map_err(|e| ClassifierError::InvalidParam(format!("bad value {value} for `{name}`: {e}")))
    }

    pub fn train(&self, x: &[SparseVec], y: &[Label]) -> Result<Classifier, ClassifierError> {
        match *self {
            ModelSpec::Nb { alpha } => train_nb(x, y, alpha).map(Classifier::Nb),
            ModelSpec::Rf {
                n_estimators,
                max_depth,
                criterion,
                seed,
            } => train_rf(
                x,
                y,
                &RfParams {
                    n_estimators,
                    max_depth,
                    criterion,
                    seed,
                },
            )
            .map(Classifier::Rf),
            ModelSpec::Svm {
                kernel,
                c,
                gamma,
                degree,
                coef0,
                tol,
                max_passes,
                seed,
            } => {
                let kernel = match kernel {
                    KernelKind::Linear => Kernel::Linear,
                    KernelKind::Rbf => Kernel::Rbf {
                        gamma: gamma.resolve(x),
                    },
                    KernelKind::Poly => Kernel::Poly {
                        gamma: gamma.resolve(x),
                        degree,
                        coef0,
                    },
                };
                let params = SmoParams {
                    tol,
                    max_passes,
                    ..SmoParams::new(c, seed)
                };
                train_svm_smo(x, y, &kernel, &params).map(Classifier::Svm)
            }
        }
    }
}

impl Learner for ModelSpec {
    type Model = Classifier;

    fn fit(&self, x: &[SparseVec], y: &[Label]) -> Result<Classifier, ClassifierError> {
        self.train(x, y)
    }
}

/// A fitted model of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Classifier {
    Nb(NbModel),
    Rf(RfModel),
    Svm(SvmModel),
}

impl Classifier {
    pub fn family(&self) -> &'static str {
        match self {
            Classifier::Nb(_) => "nb",
            Classifier::Rf(_) => "rf",
            Classifier::Svm(_) => "svm",
        }
    }
}

impl Predictor for Classifier {
    fn predict(&self, x: &SparseVec) -> Prediction {
        match self {
            Classifier::Nb(m) => {
                let (label, posterior) = predict_nb(m, x);
                let joint = m.joint_log(x);
                Prediction {
                    label,
                    confidence: posterior[label.index()],
                    score: joint[1] - joint[0],
                }
            }
            Classifier::Rf(m) => {
                let (label, confidence) = predict_rf(m, x);
                Prediction {
                    label,
                    confidence,
                    score: m.soft_score(x),
                }
            }
            Classifier::Svm(m) => {
                let (label, margin, confidence) = predict_svm(m, x);
                Prediction {
                    label,
                    confidence,
                    score: margin,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn spec_json_shape() {
        let spec: ModelSpec =
            serde_json::from_value(json!({"type": "svm", "kernel": "rbf", "C": 10, "gamma": 0.1})).unwrap();
        assert_eq!(spec, ModelSpec::reference_svm());
        let spec: ModelSpec =
            serde_json::from_value(json!({"type": "svm", "kernel": "poly", "C": 1, "gamma": "scale"})).unwrap();
        assert!(
            matches!(spec, ModelSpec::Svm { degree: 3, coef0, gamma: GammaSpec::Rule(GammaRule::Scale), .. } if coef0 == 1.0)
        );
        let spec: ModelSpec =
            serde_json::from_value(json!({"type": "rf", "n_estimators": 100, "max_depth": 20, "criterion": "entropy"}))
                .unwrap();
        assert_eq!(spec, ModelSpec::reference_rf());
        assert!(serde_json::from_value::<ModelSpec>(json!({"type": "nb", "alpha": 1, "beta": 2})).is_err());
    }

    #[test]
    fn with_param_replaces_by_name() {
        let spec = ModelSpec::reference_svm();
        let s = spec.with_param("C", &json!(100)).unwrap();
        assert!(matches!(s, ModelSpec::Svm { c, .. } if c == 100.0));
        let s = spec.with_param("gamma", &json!("auto")).unwrap();
        assert!(matches!(
            s,
            ModelSpec::Svm {
                gamma: GammaSpec::Rule(GammaRule::Auto),
                ..
            }
        ));
        let s = ModelSpec::reference_rf().with_param("max_depth", &json!(null)).unwrap();
        assert!(matches!(s, ModelSpec::Rf { max_depth: None, .. }));
        assert!(spec.with_param("alpha", &json!(1.0)).is_err());
        assert!(spec.with_param("kernel", &json!("sigmoid")).is_err());
    }

    #[test]
    fn gamma_rules() {
        let x = vec![SparseVec::from_dense(&[0.0, 2.0]), SparseVec::from_dense(&[2.0, 0.0])];
        assert_eq!(GammaSpec::Rule(GammaRule::Auto).resolve(&x), 0.5);
        // entries 0,2,2,0: mean 1, variance 1
        assert_eq!(GammaSpec::Rule(GammaRule::Scale).resolve(&x), 0.5);
        assert_eq!(GammaSpec::Value(0.1).resolve(&x), 0.1);
    }

    #[test]
    fn training_set_checks() {
        let x = vec![SparseVec::zeros(2), SparseVec::zeros(3)];
        assert!(matches!(
            check_training_set(&x, &[Label::Official, Label::Unofficial]),
            Err(ClassifierError::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(
            check_training_set(&x, &[Label::Official]),
            Err(ClassifierError::LengthMismatch { .. })
        ));
        assert!(matches!(
            check_training_set(&[], &[]),
            Err(ClassifierError::EmptyTrainingSet)
        ));
    }
}
