use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use super::cv::{cross_validate, CvSetup};
use super::{FoldPlan, TuningError};
use crate::classifiers::{ModelSpec, TrainedModel};
use crate::features::PreparedRecord;

/// Ordered parameter name → candidate values. Serialized as a JSON object
/// whose key order is the enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    entries: Vec<(String, Vec<Value>)>,
}

/// One point of the grid, in declaration order.
pub type ParamSet = Vec<(String, Value)>;

impl ParamGrid {
    pub fn new(entries: Vec<(String, Vec<Value>)>) -> Result<Self, TuningError> {
        if entries.is_empty() {
            return Err(TuningError::BadGrid("grid has no parameters".into()));
        }
        for (name, values) in &entries {
            if values.is_empty() {
                return Err(TuningError::BadGrid(format!("parameter `{name}` has no candidates")));
            }
        }
        for (i, (name, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(n, _)| n == name) {
                return Err(TuningError::BadGrid(format!("parameter `{name}` listed twice")));
            }
        }
        Ok(ParamGrid { entries })
    }

    pub fn entries(&self) -> &[(String, Vec<Value>)] {
        &self.entries
    }

    pub fn n_candidates(&self) -> usize {
        self.entries.iter().map(|(_, v)| v.len()).product()
    }

    /// Cartesian product; the first parameter varies slowest.
    pub fn candidates(&self) -> Vec<ParamSet> {
        let mut out: Vec<ParamSet> = vec![Vec::new()];
        for (name, values) in &self.entries {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push((name.clone(), v.clone()));
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Search spaces of the reference study.
    pub fn reference(family: &str) -> Option<ParamGrid> {
        let entries = match family {
            "svm" => vec![
                ("kernel", json!(["linear", "rbf", "poly"])),
                ("C", json!([0.1, 1, 10, 100])),
                ("gamma", json!(["scale", "auto", 0.1, 0.01])),
            ],
            "rf" => vec![
                ("n_estimators", json!([50, 100, 200])),
                ("max_depth", json!([null, 10, 20, 30])),
                ("criterion", json!(["gini", "entropy"])),
            ],
            "nb" => vec![("alpha", json!([0.1, 0.5, 1.0]))],
            _ => return None,
        };
        let entries = entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.as_array().expect("literal array").clone()))
            .collect();
        Some(ParamGrid::new(entries).expect("reference grids are valid"))
    }
}

impl Serialize for ParamGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), Value::Array(v.clone())))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = Map::<String, Value>::deserialize(d)?;
        let entries = map
            .into_iter()
            .map(|(k, v)| match v {
                Value::Array(a) => Ok((k, a)),
                other => Ok((k, vec![other])),
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        ParamGrid::new(entries).map_err(serde::de::Error::custom)
    }
}

pub fn describe_params(params: &ParamSet) -> String {
    struct Show<'a>(&'a ParamSet);
    impl fmt::Display for Show<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            for (i, (k, v)) in self.0.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}={v}")?;
            }
            Ok(())
        }
    }
    Show(params).to_string()
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateResult {
    pub params: Map<String, Value>,
    pub spec: ModelSpec,
    pub mean: f64,
    pub std: f64,
    pub fold_scores: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_index: usize,
    pub best_params: ParamSet,
    pub best_spec: ModelSpec,
    pub best_score: f64,
    /// Every candidate in enumeration order.
    pub candidates: Vec<CandidateResult>,
    /// Trained on all of `data` with the best parameters.
    pub final_model: TrainedModel,
}

/// Index of the first strictly greatest score, scanning in order.
pub fn select_best(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Exhaustive search: every candidate is cross-validated on the same plan,
/// the first strict maximum of the mean score wins, and the winner is
/// retrained on all of `data`.
pub fn grid_search(
    base: &ModelSpec,
    grid: &ParamGrid,
    data: &[PreparedRecord],
    plan: &FoldPlan,
    setup: &CvSetup,
) -> Result<SearchResult, TuningError> {
    let points = grid.candidates();
    let specs: Vec<ModelSpec> = points
        .iter()
        .enumerate()
        .map(|(index, params)| {
            params
                .iter()
                .try_fold(*base, |spec, (k, v)| spec.with_param(k, v))
                .map_err(|e| TuningError::Candidate {
                    index,
                    params: describe_params(params),
                    source: Box::new(TuningError::BadGrid(e.to_string())),
                })
        })
        .collect::<Result<_, _>>()?;

    let candidates: Vec<CandidateResult> = specs
        .par_iter()
        .zip(points.par_iter())
        .enumerate()
        .map(|(index, (spec, params))| {
            let report = cross_validate(spec, data, plan, setup).map_err(|e| TuningError::Candidate {
                index,
                params: describe_params(params),
                source: Box::new(e),
            })?;
            Ok(CandidateResult {
                params: params.iter().cloned().collect(),
                spec: *spec,
                mean: report.mean,
                std: report.std,
                fold_scores: report.fold_scores(),
            })
        })
        .collect::<Result<_, TuningError>>()?;

    let means: Vec<f64> = candidates.iter().map(|c| c.mean).collect();
    let best_index = select_best(&means).expect("grid is non-empty");
    let best_spec = specs[best_index];
    let mut training = data.to_vec();
    if let Some(aug) = setup.augmentation {
        training = aug.apply(&training, setup.text);
    }
    let final_model = TrainedModel::train(&best_spec, &training, setup.watchlist, setup.feature_config)
        .map_err(|e| TuningError::FinalModel(e.to_string()))?;
    Ok(SearchResult {
        best_index,
        best_params: points[best_index].clone(),
        best_spec,
        best_score: means[best_index],
        candidates,
        final_model,
    })
}
