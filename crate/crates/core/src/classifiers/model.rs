//! Trained model bundle and its JSON file format.
//!
//! The file is one JSON object `{version, labels, pipeline, model, checksum}`
//! where `checksum` is the SHA-256 of the compact serialization of the other
//! fields. Floats are written in shortest round-trip form, so a reload
//! reproduces every parameter bit for bit.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Classifier, ClassifierError, ModelSpec, Prediction, Predictor};
use crate::corpus::{AppRecord, Label};
use crate::features::{FeatureConfig, FeatureError, FeaturePipeline, PreparedRecord, SparseVec};
use crate::textprep::TextPipeline;

pub const FORMAT_VERSION: &str = "1";

const LABELS: [&str; 2] = ["official", "unofficial"];

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot access model file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("model file {path} is corrupt: {reason}")]
    Integrity { path: PathBuf, reason: String },
    #[error("model file {path} has format version {found:?}; this build reads version {FORMAT_VERSION:?}")]
    UnsupportedVersion { path: PathBuf, found: String },
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

/// Fitted feature pipeline and classifier, trained on the same records.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub version: String,
    pub pipeline: FeaturePipeline,
    pub model: Classifier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureContribution {
    pub name: String,
    pub weight: f64,
}

/// A prediction with the features that pushed hardest toward its label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    pub label: Label,
    pub confidence: f64,
    pub score: f64,
    pub top_features: Vec<FeatureContribution>,
}

impl TrainedModel {
    pub fn train(
        spec: &ModelSpec,
        training: &[PreparedRecord],
        watchlist: &[String],
        config: FeatureConfig,
    ) -> Result<Self, TrainError> {
        let pipeline = FeaturePipeline::fit(training, watchlist, config)?;
        let x: Vec<SparseVec> = training.iter().map(|p| pipeline.transform(p)).collect();
        let y: Vec<Label> = training
            .iter()
            .map(|p| p.record.label.expect("training records are labeled"))
            .collect();
        let model = spec.train(&x, &y)?;
        Ok(TrainedModel {
            version: FORMAT_VERSION.to_string(),
            pipeline,
            model,
        })
    }

    pub fn predict_vector(&self, x: &SparseVec) -> Prediction {
        self.model.predict(x)
    }

    pub fn predict_prepared(&self, prepared: &PreparedRecord) -> Prediction {
        self.predict_vector(&self.pipeline.transform(prepared))
    }

    /// Prediction plus up to `top_k` features ranked by how much zeroing
    /// each one would weaken the predicted label's score.
    pub fn explain(&self, record: &AppRecord, text: &TextPipeline, top_k: usize) -> Explanation {
        let prepared = PreparedRecord::new(record.clone(), text);
        let x = self.pipeline.transform(&prepared);
        let pred = self.predict_vector(&x);
        let toward = match pred.label {
            Label::Official => -1.0,
            Label::Unofficial => 1.0,
        };
        let names = self.pipeline.feature_names();
        let mut contributions: Vec<FeatureContribution> = x
            .indices
            .iter()
            .map(|&j| {
                let without = self.model.predict(&x.without(j as usize)).score;
                FeatureContribution {
                    name: names[j as usize].clone(),
                    weight: toward * (pred.score - without),
                }
            })
            .filter(|c| c.weight > 0.0)
            .collect();
        contributions.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.name.cmp(&b.name)));
        contributions.truncate(top_k);
        Explanation {
            label: pred.label,
            confidence: pred.confidence,
            score: pred.score,
            top_features: contributions,
        }
    }
}

#[derive(Serialize)]
struct BodyRef<'a> {
    version: &'a str,
    labels: [&'a str; 2],
    pipeline: &'a FeaturePipeline,
    model: &'a Classifier,
}

#[derive(Deserialize)]
struct Body {
    version: String,
    labels: [String; 2],
    pipeline: FeaturePipeline,
    model: Classifier,
}

fn checksum(body: &BodyRef) -> String {
    let bytes = serde_json::to_vec(body).expect("model serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<(), ModelFileError> {
    let body = BodyRef {
        version: &model.version,
        labels: LABELS,
        pipeline: &model.pipeline,
        model: &model.model,
    };
    let mut value = serde_json::to_value(&body).expect("model serializes");
    value
        .as_object_mut()
        .expect("body is an object")
        .insert("checksum".into(), checksum(&body).into());
    let mut text = serde_json::to_string(&value).expect("model serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| ModelFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<TrainedModel, ModelFileError> {
    let text = fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let corrupt = |reason: String| ModelFileError::Integrity {
        path: path.to_path_buf(),
        reason,
    };
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| corrupt(format!("not valid JSON ({e})")))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| corrupt("top level is not an object".into()))?;
    let version = obj
        .get("version")
        .and_then(|v| v.as_str())
        .ok_or_else(|| corrupt("missing version".into()))?
        .to_string();
    if version != FORMAT_VERSION {
        return Err(ModelFileError::UnsupportedVersion {
            path: path.to_path_buf(),
            found: version,
        });
    }
    let stored = match obj.remove("checksum") {
        Some(serde_json::Value::String(s)) => s,
        _ => return Err(corrupt("missing checksum".into())),
    };
    let body: Body = serde_json::from_value(value).map_err(|e| corrupt(format!("bad structure ({e})")))?;
    if body.labels != LABELS {
        return Err(corrupt(format!("unexpected label convention {:?}", body.labels)));
    }
    let computed = checksum(&BodyRef {
        version: &body.version,
        labels: LABELS,
        pipeline: &body.pipeline,
        model: &body.model,
    });
    if computed != stored {
        return Err(corrupt("checksum mismatch".into()));
    }
    Ok(TrainedModel {
        version: body.version,
        pipeline: body.pipeline,
        model: body.model,
    })
}
