use rand::seq::SliceRandom;
use serde::Serialize;

use super::TuningError;
use crate::corpus::Label;
use crate::rng::{stream, DOMAIN_FOLDS};

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Builds a plan from explicit assignments.
    pub fn from_assignments(k: usize, seed: u64, assignments: Vec<usize>) -> Result<Self, TuningError> {
        if k < 2 {
            return Err(TuningError::BadFoldCount(k));
        }
        if let Some(&bad) = assignments.iter().find(|&&f| f >= k) {
            return Err(TuningError::BadPlan(format!("fold index {bad} with k = {k}")));
        }
        Ok(FoldPlan { k, seed, assignments })
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// `(training indices, held-out indices)` for fold `f`, both ascending.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.len()).partition(|&i| self.assignments[i] != f)
    }
}

/// Shuffles each class with its own seeded stream and deals the samples
/// round-robin; the second class continues where the first stopped so fold
/// sizes stay within one of each other.
pub fn stratified_k_fold(labels: &[Label], k: usize, seed: u64) -> Result<FoldPlan, TuningError> {
    if k < 2 {
        return Err(TuningError::BadFoldCount(k));
    }
    let mut assignments = vec![0; labels.len()];
    let mut next = 0;
    for label in Label::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if members.len() < k {
            return Err(TuningError::ClassTooSmall {
                label,
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut stream(seed, DOMAIN_FOLDS, label.index() as u64));
        for i in members {
            assignments[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan { k, seed, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn balanced(n: usize) -> Vec<Label> {
        (0..2 * n)
            .map(|i| if i < n { Label::Official } else { Label::Unofficial })
            .collect()
    }

    #[test]
    fn ten_folds_of_twenty() {
        let y = balanced(100);
        let plan = stratified_k_fold(&y, 10, 42).unwrap();
        for f in 0..10 {
            let (_, test) = plan.split(f);
            assert_eq!(test.len(), 20);
            assert_eq!(test.iter().filter(|&&i| y[i] == Label::Official).count(), 10);
        }
    }

    #[test]
    fn smallest_case() {
        let y = balanced(2);
        let plan = stratified_k_fold(&y, 2, 0).unwrap();
        for f in 0..2 {
            let (_, test) = plan.split(f);
            let mut got: Vec<Label> = test.iter().map(|&i| y[i]).collect();
            got.sort_by_key(|l| l.index());
            assert_eq!(got, vec![Label::Official, Label::Unofficial]);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            stratified_k_fold(&balanced(5), 1, 0),
            Err(TuningError::BadFoldCount(1))
        ));
        assert!(matches!(
            stratified_k_fold(&balanced(3), 4, 0),
            Err(TuningError::ClassTooSmall { count: 3, k: 4, .. })
        ));
    }

    #[test]
    fn deterministic() {
        let y = balanced(30);
        assert_eq!(
            stratified_k_fold(&y, 5, 9).unwrap(),
            stratified_k_fold(&y, 5, 9).unwrap()
        );
        assert_ne!(
            stratified_k_fold(&y, 5, 9).unwrap(),
            stratified_k_fold(&y, 5, 10).unwrap()
        );
    }

    proptest! {
        #[test]
        fn stratification_bounds(flags in prop::collection::vec(any::<bool>(), 10..120), k in 2usize..8, seed in any::<u64>()) {
            let y: Vec<Label> = flags.iter().map(|&b| if b { Label::Unofficial } else { Label::Official }).collect();
            let plan = match stratified_k_fold(&y, k, seed) {
                Ok(p) => p,
                Err(_) => return Ok(()),
            };
            let mut size = vec![0usize; k];
            let mut per_class = vec![[0usize; 2]; k];
            for (i, &f) in plan.assignments.iter().enumerate() {
                size[f] += 1;
                per_class[f][y[i].index()] += 1;
            }
            prop_assert!(size.iter().max().unwrap() - size.iter().min().unwrap() <= 1);
            for c in 0..2 {
                let counts: Vec<usize> = per_class.iter().map(|p| p[c]).collect();
                prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
            }
            let mut seen = 0;
            for f in 0..k {
                let (train, test) = plan.split(f);
                prop_assert_eq!(train.len() + test.len(), y.len());
                seen += test.len();
            }
            prop_assert_eq!(seen, y.len());
        }
    }
}
