use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Columns, Criterion, DecisionTree, TreeNode, TreeParams};
use super::{check_training_set, ClassifierError};
use crate::corpus::Label;
use crate::features::SparseVec;
use crate::rng::{stream, DOMAIN_FOREST};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_estimators: usize,
    /// `None` grows every tree to purity.
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfModel {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    pub features_per_split: usize,
    pub n_features: usize,
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<TreeNode>,
}

impl RfModel {
    /// Per-class vote totals.
    pub fn votes(&self, x: &SparseVec) -> [usize; 2] {
        let get = |j: usize| x.get(j);
        let mut votes = [0usize; 2];
        for tree in &self.trees {
            votes[tree.predict(&get).index()] += 1;
        }
        votes
    }

    /// Mean leaf probability of `Unofficial` minus that of `Official`.
    pub fn soft_score(&self, x: &SparseVec) -> f64 {
        let get = |j: usize| x.get(j);
        let total: f64 = self
            .trees
            .iter()
            .map(|t| {
                let c = t.leaf(&get);
                (c[1] as f64 - c[0] as f64) / (c[0] + c[1]) as f64
            })
            .sum();
        total / self.trees.len() as f64
    }
}

pub fn train_rf(x: &[SparseVec], y: &[Label], params: &RfParams) -> Result<RfModel, ClassifierError> {
    if params.n_estimators == 0 {
        return Err(ClassifierError::InvalidParam("n_estimators must be at least 1".into()));
    }
    if params.max_depth == Some(0) {
        return Err(ClassifierError::InvalidParam("max_depth must be at least 1".into()));
    }
    let d = check_training_set(x, y)?;
    if x.len() < 2 {
        return Err(ClassifierError::InvalidParam(
            "random forest needs at least 2 samples".into(),
        ));
    }
    let columns = to_columns(x, d);
    let features_per_split = ((d as f64).sqrt().ceil() as usize).max(1);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        criterion: params.criterion,
        max_features: features_per_split,
    };
    let tree_seeds: Vec<u64> = (0..params.n_estimators as u64)
        .map(|t| stream(params.seed, DOMAIN_FOREST, t).next_u64())
        .collect();
    let n = x.len();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let samples: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            DecisionTree::fit(&columns, y, &samples, &tree_params, &mut rng)
        })
        .collect();
    Ok(RfModel {
        n_estimators: params.n_estimators,
        max_depth: params.max_depth,
        criterion: params.criterion,
        features_per_split,
        n_features: d,
        tree_seeds,
        trees,
    })
}

fn to_columns(x: &[SparseVec], d: usize) -> Columns {
    let mut data = vec![vec![0.0; x.len()]; d];
    for (i, row) in x.iter().enumerate() {
        for (j, v) in row.iter() {
            data[j][i] = v;
        }
    }
    Columns { n_rows: x.len(), data }
}

/// Majority vote and the winner's vote fraction. Ties go to `Official`.
pub fn predict_rf(model: &RfModel, x: &SparseVec) -> (Label, f64) {
    let votes = model.votes(x);
    let label = if votes[1] > votes[0] {
        Label::Unofficial
    } else {
        Label::Official
    };
    (label, votes[label.index()] as f64 / model.trees.len() as f64)
}

/// Mean of the per-tree normalized impurity decreases, renormalized to sum
/// to 1. All zeros when no tree ever split.
pub fn rf_feature_importance(model: &RfModel) -> Vec<f64> {
    let mut mean = vec![0.0; model.n_features];
    for tree in &model.trees {
        let mut imp = vec![0.0; model.n_features];
        tree.accumulate_importance(model.criterion, &mut imp);
        let total: f64 = imp.iter().sum();
        if total > 0.0 {
            for (m, v) in mean.iter_mut().zip(&imp) {
                *m += v / total;
            }
        }
    }
    let total: f64 = mean.iter().sum();
    if total > 0.0 {
        mean.iter_mut().for_each(|m| *m /= total);
    }
    mean
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> SparseVec {
        SparseVec::from_dense(x)
    }

    /// Feature 2 separates the classes; the others are noise.
    fn separable(n: usize) -> (Vec<SparseVec>, Vec<Label>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = Label::from_index(i % 2).unwrap();
            let noise = ((i * 37) % 11) as f64 / 11.0;
            x.push(v(&[noise, 1.0 - noise, label.index() as f64, 0.5]));
            y.push(label);
        }
        (x, y)
    }

    fn params(n_estimators: usize, seed: u64) -> RfParams {
        RfParams {
            n_estimators,
            max_depth: Some(20),
            criterion: Criterion::Entropy,
            seed,
        }
    }

    #[test]
    fn separable_feature_is_learned() {
        let (x, y) = separable(40);
        let model = train_rf(&x, &y, &params(25, 7)).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(predict_rf(&model, xi).0, *yi);
        }
        for tree in &model.trees {
            assert!(tree.depth() <= 20);
        }
    }

    #[test]
    fn importance_concentrates_on_discriminator() {
        let x: Vec<SparseVec> = (0..30).map(|i| v(&[0.0, (i % 2) as f64, 1.0])).collect();
        let y: Vec<Label> = (0..30).map(|i| Label::from_index(i % 2).unwrap()).collect();
        let model = train_rf(&x, &y, &params(10, 1)).unwrap();
        let imp = rf_feature_importance(&model);
        assert_eq!(imp, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn importance_sums_to_one() {
        let (x, y) = separable(50);
        let imp = rf_feature_importance(&train_rf(&x, &y, &params(30, 9)).unwrap());
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(imp[3], 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let (x, y) = separable(30);
        let a = train_rf(&x, &y, &params(15, 3)).unwrap();
        let b = train_rf(&x, &y, &params(15, 3)).unwrap();
        assert_eq!(a, b);
        let c = train_rf(&x, &y, &params(15, 4)).unwrap();
        assert_ne!(a.tree_seeds, c.tree_seeds);
    }

    #[test]
    fn vote_rules() {
        let leaf = |c: [usize; 2]| TreeNode::Leaf { counts: c };
        let mut model = RfModel {
            n_estimators: 4,
            max_depth: None,
            criterion: Criterion::Gini,
            features_per_split: 1,
            n_features: 1,
            tree_seeds: vec![0; 4],
            trees: vec![leaf([0, 3]); 4],
        };
        assert_eq!(predict_rf(&model, &v(&[0.0])), (Label::Unofficial, 1.0));
        model.trees[0] = leaf([2, 1]);
        model.trees[1] = leaf([2, 1]);
        assert_eq!(predict_rf(&model, &v(&[0.0])), (Label::Official, 0.5));
        model.trees.reverse();
        assert_eq!(predict_rf(&model, &v(&[0.0])), (Label::Official, 0.5));
    }

    #[test]
    fn invalid_params() {
        let (x, y) = separable(10);
        assert!(train_rf(&x, &y, &params(0, 1)).is_err());
        let mut p = params(1, 1);
        p.max_depth = Some(0);
        assert!(train_rf(&x, &y, &p).is_err());
        assert!(train_rf(&x[..1], &y[..1], &params(1, 1)).is_err());
    }
}
