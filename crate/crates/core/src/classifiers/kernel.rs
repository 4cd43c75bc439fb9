use serde::{Deserialize, Serialize};

use super::ClassifierError;
use crate::features::SparseVec;

/// SVM kernel with exactly the parameters its kind needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kernel {
    /// `a . b`
    Linear,
    /// `exp(-gamma * ||a - b||^2)`
    Rbf { gamma: f64 },
    /// `(gamma * a . b + coef0)^degree`
    Poly { gamma: f64, degree: u32, coef0: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |msg: String| Err(ClassifierError::InvalidParam(msg));
        match *self {
            Kernel::Linear => Ok(()),
            Kernel::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                bad(format!("rbf gamma must be positive, got {gamma}"))
            }
            Kernel::Poly { gamma, .. } if !(gamma > 0.0 && gamma.is_finite()) => {
                bad(format!("poly gamma must be positive, got {gamma}"))
            }
            Kernel::Poly { degree, .. } if degree < 2 => bad(format!("poly degree must be at least 2, got {degree}")),
            Kernel::Poly { coef0, .. } if !coef0.is_finite() => bad("poly coef0 must be finite".into()),
            _ => Ok(()),
        }
    }

    /// Caller guarantees equal dimensions.
    pub(crate) fn eval_unchecked(&self, a: &SparseVec, b: &SparseVec) -> f64 {
        match *self {
            Kernel::Linear => a.dot(b),
            Kernel::Rbf { gamma } => (-gamma * a.squared_distance(b)).exp(),
            Kernel::Poly { gamma, degree, coef0 } => (gamma * a.dot(b) + coef0).powi(degree as i32),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Rbf { .. } => "rbf",
            Kernel::Poly { .. } => "poly",
        }
    }
}

pub fn kernel_eval(kernel: &Kernel, a: &SparseVec, b: &SparseVec) -> Result<f64, ClassifierError> {
    if a.dim != b.dim {
        return Err(ClassifierError::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(kernel.eval_unchecked(a, b))
}

/// Full kernel matrix, row-major.
pub fn kernel_matrix(kernel: &Kernel, rows: &[SparseVec]) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    (0..rows.len())
        .into_par_iter()
        .map(|i| rows.iter().map(|r| kernel.eval_unchecked(&rows[i], r)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> SparseVec {
        SparseVec::from_dense(x)
    }

    #[test]
    fn linear_dot() {
        assert_eq!(
            kernel_eval(&Kernel::Linear, &v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(),
            11.0
        );
    }

    #[test]
    fn rbf_values() {
        let k = Kernel::Rbf { gamma: 0.1 };
        assert_eq!(kernel_eval(&k, &v(&[0.3, 0.7]), &v(&[0.3, 0.7])).unwrap(), 1.0);
        let got = kernel_eval(&k, &v(&[0.0, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((got - 0.904_837_418_035_959_6).abs() < 1e-12);
    }

    #[test]
    fn poly_value() {
        let k = Kernel::Poly {
            gamma: 0.5,
            degree: 3,
            coef0: 1.0,
        };
        // (0.5 * 11 + 1)^3
        assert!((kernel_eval(&k, &v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap() - 274.625).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            kernel_eval(&Kernel::Linear, &v(&[1.0]), &v(&[1.0, 2.0])),
            Err(ClassifierError::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn parameter_validation() {
        assert!(Kernel::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(Kernel::Poly {
            gamma: 1.0,
            degree: 1,
            coef0: 0.0
        }
        .validate()
        .is_err());
        assert!(Kernel::Poly {
            gamma: 1.0,
            degree: 3,
            coef0: 1.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn serde_shape() {
        let json = serde_json::to_string(&Kernel::Rbf { gamma: 0.1 }).unwrap();
        assert_eq!(json, r#"{"kind":"rbf","gamma":0.1}"#);
        assert_eq!(serde_json::to_string(&Kernel::Linear).unwrap(), r#"{"kind":"linear"}"#);
    }

    fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..5).prop_flat_map(|d| {
            prop::collection::vec(prop::collection::vec(prop_oneof![Just(0.0), -2.0f64..2.0], d), 1..7)
        })
    }

    proptest! {
        #[test]
        fn gram_properties(rows in rows_strategy(), gamma in 0.01f64..2.0) {
            let sparse: Vec<SparseVec> = rows.iter().map(|r| v(r)).collect();
            let rbf = kernel_matrix(&Kernel::Rbf { gamma }, &sparse);
            let lin = kernel_matrix(&Kernel::Linear, &sparse);
            for i in 0..rows.len() {
                prop_assert_eq!(rbf[i][i], 1.0);
                for j in 0..rows.len() {
                    prop_assert_eq!(rbf[i][j], rbf[j][i]);
                    prop_assert_eq!(lin[i][j], lin[j][i]);
                    let brute: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                    prop_assert!((lin[i][j] - brute).abs() < 1e-12);
                }
            }
        }
    }
}
