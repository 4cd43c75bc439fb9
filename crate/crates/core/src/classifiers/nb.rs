//! Multinomial Naive Bayes over non-negative real feature mass.
//!
//! `ln P(j | c) = ln((m_cj + alpha) / (sum_j m_cj + alpha * d))` where `m_cj`
//! is the summed value of feature `j` over class `c`; priors are class
//! frequencies.

use serde::{Deserialize, Serialize};

use super::{check_training_set, ClassifierError};
use crate::corpus::Label;
use crate::features::SparseVec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub alpha: f64,
    pub log_prior: [f64; 2],
    pub log_likelihood: [Vec<f64>; 2],
}

impl NbModel {
    pub fn n_features(&self) -> usize {
        self.log_likelihood[0].len()
    }

    /// Unnormalized log joint `ln P(c) + sum_j x_j ln P(j | c)`.
    pub fn joint_log(&self, x: &SparseVec) -> [f64; 2] {
        let mut out = self.log_prior;
        for (c, ll) in self.log_likelihood.iter().enumerate() {
            out[c] += x.iter().map(|(j, v)| v * ll[j]).sum::<f64>();
        }
        out
    }
}

pub fn train_nb(x: &[SparseVec], y: &[Label], alpha: f64) -> Result<NbModel, ClassifierError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ClassifierError::InvalidParam(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let dim = check_training_set(x, y)?;
    let mut mass = [vec![0.0; dim], vec![0.0; dim]];
    let mut class_count = [0usize; 2];
    for (row, (xi, &yi)) in x.iter().zip(y).enumerate() {
        class_count[yi.index()] += 1;
        for (j, v) in xi.iter() {
            if v < 0.0 {
                return Err(ClassifierError::NegativeFeature {
                    row,
                    column: j,
                    value: v,
                });
            }
            mass[yi.index()][j] += v;
        }
    }
    let n = x.len() as f64;
    let log_prior = class_count.map(|c| (c as f64 / n).ln());
    let log_likelihood = mass.map(|m| {
        let total: f64 = m.iter().sum::<f64>() + alpha * dim as f64;
        m.iter().map(|&v| ((v + alpha) / total).ln()).collect()
    });
    Ok(NbModel {
        alpha,
        log_prior,
        log_likelihood,
    })
}

/// Label and normalized posterior. Ties go to `Official`.
pub fn predict_nb(model: &NbModel, x: &SparseVec) -> (Label, [f64; 2]) {
    let joint = model.joint_log(x);
    let max = joint[0].max(joint[1]);
    let unnorm = joint.map(|j| (j - max).exp());
    let z = unnorm[0] + unnorm[1];
    let posterior = unnorm.map(|u| u / z);
    let label = if joint[1] > joint[0] {
        Label::Unofficial
    } else {
        Label::Official
    };
    (label, posterior)
}
