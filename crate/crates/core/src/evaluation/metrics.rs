use serde::{Deserialize, Serialize};

use super::EvaluationError;
use crate::corpus::Label;

/// Binary confusion counts with `Official` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, fn_: usize, fp: usize, tn: usize) -> Self {
        ConfusionMatrix { tp, fn_, fp, tn }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Official, Label::Official) => self.tp += 1,
            (Label::Official, Label::Unofficial) => self.fn_ += 1,
            (Label::Unofficial, Label::Official) => self.fp += 1,
            (Label::Unofficial, Label::Unofficial) => self.tn += 1,
        }
    }

    pub fn merge(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix::new(
            self.tp + other.tp,
            self.fn_ + other.fn_,
            self.fp + other.fp,
            self.tn + other.tn,
        )
    }
}

pub fn confusion_from_predictions(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionMatrix, EvaluationError> {
    if y_true.len() != y_pred.len() {
        return Err(EvaluationError::LengthMismatch {
            truth: y_true.len(),
            predicted: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvaluationError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm.record(t, p);
    }
    Ok(cm)
}

/// Which metrics had a zero denominator and were reported as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Degenerate {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl Degenerate {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub degenerate: Degenerate,
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<Metrics, EvaluationError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvaluationError::Empty);
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            (0.0, true)
        } else {
            (num as f64 / den as f64, false)
        }
    };
    let accuracy = (cm.tp + cm.tn) as f64 / total as f64;
    let (precision, p_degenerate) = ratio(cm.tp, cm.tp + cm.fp);
    let (recall, r_degenerate) = ratio(cm.tp, cm.tp + cm.fn_);
    let f1_degenerate = p_degenerate || r_degenerate || precision + recall == 0.0;
    let f1 = if f1_degenerate {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
        degenerate: Degenerate {
            precision: p_degenerate,
            recall: r_degenerate,
            f1: f1_degenerate,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_matrix() {
        let m = compute_metrics(&ConfusionMatrix::new(92, 8, 7, 93)).unwrap();
        assert!((m.accuracy - 0.925).abs() < 1e-12);
        assert!((m.precision - 92.0 / 99.0).abs() < 1e-12);
        assert!((m.recall - 0.92).abs() < 1e-12);
        assert!((m.f1 - 184.0 / 199.0).abs() < 1e-12);
        assert!(!m.degenerate.any());
    }

    #[test]
    fn perfect_predictions() {
        let m = compute_metrics(&ConfusionMatrix::new(10, 0, 0, 10)).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn degenerate_cases_are_zero_not_nan() {
        let m = compute_metrics(&ConfusionMatrix::new(0, 5, 0, 5)).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.degenerate.precision && m.degenerate.f1 && !m.degenerate.recall);
        let m = compute_metrics(&ConfusionMatrix::new(0, 0, 3, 7)).unwrap();
        assert!(m.degenerate.recall);
        assert!(compute_metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn all_official_identity() {
        let y = vec![Label::Official; 6];
        assert_eq!(
            confusion_from_predictions(&y, &y).unwrap(),
            ConfusionMatrix::new(6, 0, 0, 0)
        );
        assert!(confusion_from_predictions(&y, &y[..2]).is_err());
        assert!(confusion_from_predictions(&[], &[]).is_err());
    }

    fn labels(n: usize) -> impl Strategy<Value = Vec<(bool, bool)>> {
        prop::collection::vec((any::<bool>(), any::<bool>()), 1..n)
    }

    proptest! {
        #[test]
        fn swapping_predictions_permutes_counts(pairs in labels(60)) {
            let lab = |b: bool| if b { Label::Unofficial } else { Label::Official };
            let t: Vec<Label> = pairs.iter().map(|p| lab(p.0)).collect();
            let p: Vec<Label> = pairs.iter().map(|p| lab(p.1)).collect();
            let flipped: Vec<Label> = p.iter().map(|l| l.other()).collect();
            let a = confusion_from_predictions(&t, &p).unwrap();
            let b = confusion_from_predictions(&t, &flipped).unwrap();
            prop_assert_eq!(b, ConfusionMatrix::new(a.fn_, a.tp, a.tn, a.fp));
            prop_assert_eq!(a.total(), pairs.len());
        }

        #[test]
        fn metric_identities(tp in 0usize..50, fn_ in 0usize..50, fp in 0usize..50, tn in 0usize..50) {
            let cm = ConfusionMatrix::new(tp, fn_, fp, tn);
            prop_assume!(cm.total() > 0);
            let m = compute_metrics(&cm).unwrap();
            prop_assert_eq!(m.accuracy, (tp + tn) as f64 / cm.total() as f64);
            for v in [m.accuracy, m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if !m.degenerate.f1 {
                let harmonic = 2.0 / (1.0 / m.precision + 1.0 / m.recall);
                prop_assert!((m.f1 - harmonic).abs() < 1e-12);
            }
            if !m.degenerate.any() && m.precision == m.recall {
                prop_assert!((m.f1 - m.precision).abs() < 1e-12);
            }
        }
    }
}
