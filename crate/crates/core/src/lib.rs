//! Hybrid text-and-metadata classification of Hajj/Umrah travel-agency apps.
//!
//! The pipeline runs in stages, one module each:
//!
//! * [`corpus`]: the app record schema, JSON-lines ingestion, cleaning,
//!   registry-based labeling, seeded synthetic data and synonym augmentation.
//! * [`textprep`]: Indonesian case folding, tokenization, stopword removal
//!   and affix-stripping stemming.
//! * [`features`]: TF-IDF, watchlist permission encoding and metadata
//!   scaling, concatenated into one sparse vector per app.
//! * [`classifiers`]: Naive Bayes, random forest and an SMO-trained SVM,
//!   plus the model file format.
//! * [`tuning`]: stratified k-fold cross-validation and grid search.
//! * [`evaluation`]: confusion matrices, metrics, ablation and feature
//!   importance reports.

pub mod classifiers;
pub mod corpus;
pub mod evaluation;
pub mod features;
pub mod textprep;
pub mod tuning;

mod rng;

pub use classifiers::{Classifier, Explanation, ModelSpec, Prediction, Predictor, TrainedModel};
pub use corpus::{AppRecord, Label, RegistrySnapshot};
pub use evaluation::{ConfusionMatrix, Metrics};
pub use features::{FeatureConfig, FeaturePipeline, SparseVec};
pub use tuning::{FoldPlan, ParamGrid};

pub use textprep::TextPipeline;
