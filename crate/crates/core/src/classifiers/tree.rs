//! CART-style binary decision trees on dense column-major data.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::corpus::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        }
    }
}

/// Node impurity from per-class counts. Entropy uses log base 2.
pub fn impurity(class_counts: &[usize], criterion: Criterion) -> Result<f64, ClassifierError> {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(ClassifierError::InvalidParam("impurity of an empty node".into()));
    }
    let total = total as f64;
    let probs = class_counts.iter().map(|&c| c as f64 / total);
    Ok(match criterion {
        Criterion::Gini => 1.0 - probs.map(|p| p * p).sum::<f64>(),
        Criterion::Entropy => -probs.filter(|&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>(),
    })
}

fn impurity2(counts: [usize; 2], criterion: Criterion) -> f64 {
    impurity(&counts, criterion).unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode {
    Leaf {
        counts: [usize; 2],
    },
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf<'a>(&'a self, x: &impl Fn(usize) -> f64) -> &'a [usize; 2] {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x(*feature) <= *threshold { left } else { right },
            }
        }
    }

    /// Majority class of the reached leaf, ties to `Official`.
    pub fn predict(&self, x: &impl Fn(usize) -> f64) -> Label {
        let c = self.leaf(x);
        if c[1] > c[0] {
            Label::Unofficial
        } else {
            Label::Official
        }
    }

    /// Depth of the deepest leaf; a lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn counts(&self) -> [usize; 2] {
        match self {
            TreeNode::Leaf { counts } => *counts,
            TreeNode::Split { left, right, .. } => {
                let (l, r) = (left.counts(), right.counts());
                [l[0] + r[0], l[1] + r[1]]
            }
        }
    }

    /// Adds `n_node * impurity decrease` of every split to `out[feature]`.
    pub fn accumulate_importance(&self, criterion: Criterion, out: &mut [f64]) -> [usize; 2] {
        match self {
            TreeNode::Leaf { counts } => *counts,
            TreeNode::Split {
                feature, left, right, ..
            } => {
                let l = left.accumulate_importance(criterion, out);
                let r = right.accumulate_importance(criterion, out);
                let node = [l[0] + r[0], l[1] + r[1]];
                let n = |c: [usize; 2]| (c[0] + c[1]) as f64;
                out[*feature] += n(node) * impurity2(node, criterion)
                    - n(l) * impurity2(l, criterion)
                    - n(r) * impurity2(r, criterion);
                node
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    pub max_features: usize,
}

/// Column-major dense matrix.
#[derive(Debug, Clone)]
pub struct Columns {
    pub n_rows: usize,
    pub data: Vec<Vec<f64>>,
}

impl Columns {
    pub fn n_features(&self) -> usize {
        self.data.len()
    }
}

pub struct DecisionTree;

impl DecisionTree {
    /// Grows a tree on `samples` (row indices, repeats allowed).
    pub fn fit<R: Rng>(
        columns: &Columns,
        y: &[Label],
        samples: &[usize],
        params: &TreeParams,
        rng: &mut R,
    ) -> TreeNode {
        let mut grower = Grower {
            columns,
            y,
            params,
            rng,
            order: (0..columns.n_features()).collect(),
        };
        grower.grow(samples.to_vec(), 0)
    }
}

struct Grower<'a, R> {
    columns: &'a Columns,
    y: &'a [Label],
    params: &'a TreeParams,
    rng: &'a mut R,
    order: Vec<usize>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

impl<R: Rng> Grower<'_, R> {
    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> TreeNode {
        let mut counts = [0usize; 2];
        for &i in &samples {
            counts[self.y[i].index()] += 1;
        }
        let pure = counts[0] == 0 || counts[1] == 0;
        let at_limit = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || at_limit || samples.len() < 2 {
            return TreeNode::Leaf { counts };
        }
        let Some(best) = self.best_split(&samples, counts) else {
            return TreeNode::Leaf { counts };
        };
        let col = &self.columns.data[best.feature];
        let (left, right): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| col[i] <= best.threshold);
        TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(left, depth + 1)),
            right: Box::new(self.grow(right, depth + 1)),
        }
    }

    /// Draws features in random order until `max_features` non-constant
    /// ones have been scored.
    fn best_split(&mut self, samples: &[usize], counts: [usize; 2]) -> Option<BestSplit> {
        let criterion = self.params.criterion;
        let n = samples.len() as f64;
        let parent = impurity2(counts, criterion);
        self.order.shuffle(self.rng);
        let mut best: Option<BestSplit> = None;
        let mut scored = 0;
        let mut pairs: Vec<(f64, Label)> = Vec::with_capacity(samples.len());
        for &f in &self.order {
            if scored >= self.params.max_features {
                break;
            }
            let col = &self.columns.data[f];
            pairs.clear();
            pairs.extend(samples.iter().map(|&i| (col[i], self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[pairs.len() - 1].0 {
                continue;
            }
            scored += 1;
            let mut left = [0usize; 2];
            for k in 0..pairs.len() - 1 {
                left[pairs[k].1.index()] += 1;
                let (lo, hi) = (pairs[k].0, pairs[k + 1].0);
                if lo == hi {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let nl = (k + 1) as f64;
                let child = (nl * impurity2(left, criterion) + (n - nl) * impurity2(right, criterion)) / n;
                let decrease = parent - child;
                if best.as_ref().is_none_or(|b| decrease > b.decrease) {
                    let mid = lo + (hi - lo) / 2.0;
                    best = Some(BestSplit {
                        feature: f,
                        threshold: if mid < hi { mid } else { lo },
                        decrease,
                    });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn impurity_examples() {
        assert_eq!(impurity(&[10, 0], Criterion::Gini).unwrap(), 0.0);
        assert_eq!(impurity(&[5, 5], Criterion::Gini).unwrap(), 0.5);
        assert_eq!(impurity(&[5, 5], Criterion::Entropy).unwrap(), 1.0);
        assert_eq!(impurity(&[0, 7], Criterion::Entropy).unwrap(), 0.0);
        assert!(impurity(&[0, 0], Criterion::Gini).is_err());
    }

    fn columns(rows: &[Vec<f64>]) -> Columns {
        let d = rows[0].len();
        Columns {
            n_rows: rows.len(),
            data: (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect(),
        }
    }

    #[test]
    fn threshold_is_midpoint() {
        let cols = columns(&[vec![1.0], vec![2.0], vec![4.0], vec![6.0]]);
        let y = [Label::Official, Label::Official, Label::Unofficial, Label::Unofficial];
        let params = TreeParams {
            max_depth: None,
            criterion: Criterion::Gini,
            max_features: 1,
        };
        let tree = DecisionTree::fit(&cols, &y, &[0, 1, 2, 3], &params, &mut ChaCha8Rng::seed_from_u64(0));
        match tree {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, 3.0);
            }
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn single_sample_is_leaf() {
        let cols = columns(&[vec![1.0, 0.0]]);
        let params = TreeParams {
            max_depth: Some(5),
            criterion: Criterion::Entropy,
            max_features: 1,
        };
        let tree = DecisionTree::fit(
            &cols,
            &[Label::Unofficial],
            &[0],
            &params,
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert_eq!(tree, TreeNode::Leaf { counts: [0, 1] });
        assert_eq!(tree.predict(&|_| 0.0), Label::Unofficial);
    }

    #[test]
    fn depth_limit_respected() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 11) as f64]).collect();
        let y: Vec<Label> = (0..40)
            .map(|i| Label::from_index(((i * 5) % 3 == 0) as usize).unwrap())
            .collect();
        let cols = columns(&rows);
        for max_depth in 1..4 {
            let params = TreeParams {
                max_depth: Some(max_depth),
                criterion: Criterion::Gini,
                max_features: 2,
            };
            let samples: Vec<usize> = (0..40).collect();
            let tree = DecisionTree::fit(&cols, &y, &samples, &params, &mut ChaCha8Rng::seed_from_u64(3));
            assert!(tree.depth() <= max_depth);
            assert_eq!(tree.counts().iter().sum::<usize>(), 40);
        }
    }

    #[test]
    fn constant_features_are_skipped() {
        // feature 0 is constant; with max_features = 1 the grower must still
        // reach feature 1
        let cols = columns(&[vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 1.0]]);
        let y = [Label::Official, Label::Unofficial, Label::Official, Label::Unofficial];
        let params = TreeParams {
            max_depth: None,
            criterion: Criterion::Gini,
            max_features: 1,
        };
        for seed in 0..10 {
            let tree = DecisionTree::fit(&cols, &y, &[0, 1, 2, 3], &params, &mut ChaCha8Rng::seed_from_u64(seed));
            assert!(matches!(tree, TreeNode::Split { feature: 1, .. }));
        }
    }
}
