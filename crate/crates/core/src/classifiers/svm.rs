//! Soft-margin SVM trained with SMO.
//!
//! Training runs the simplified SMO sweep (random second index, stop after
//! `max_passes` sweeps without change) and then polishes with
//! maximal-violating-pair steps until the KKT gap is within `tol`. The sweep
//! alone can stop with a few points still violating the conditions; the
//! second phase makes the exit state checkable.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::{kernel_matrix, Kernel};
use super::{check_training_set, ClassifierError};
use crate::corpus::Label;
use crate::features::SparseVec;
use crate::rng::{stream, DOMAIN_SMO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoParams {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
    /// Hard cap on sweeps plus pair steps.
    pub max_iterations: usize,
}

impl SmoParams {
    pub fn new(c: f64, seed: u64) -> Self {
        SmoParams {
            c,
            tol: 1e-3,
            max_passes: 10,
            seed,
            max_iterations: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    #[serde(rename = "C")]
    pub c: f64,
    pub bias: f64,
    pub support_vectors: Vec<SparseVec>,
    /// `alpha_i * y_i` per support vector.
    pub dual_coefs: Vec<f64>,
}

impl SvmModel {
    pub fn margin(&self, x: &SparseVec) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, a)| a * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }

    pub fn n_features(&self) -> Option<usize> {
        self.support_vectors.first().map(|s| s.dim)
    }

    /// Primal weight vector; only meaningful for the linear kernel.
    pub fn linear_weights(&self, dim: usize) -> Vec<f64> {
        let mut w = vec![0.0; dim];
        for (sv, a) in self.support_vectors.iter().zip(&self.dual_coefs) {
            for (j, v) in sv.iter() {
                w[j] += a * v;
            }
        }
        w
    }
}

/// Full solver state at exit, for inspection.
#[derive(Debug, Clone)]
pub struct SmoOutcome {
    pub model: SvmModel,
    /// One multiplier per training sample.
    pub alphas: Vec<f64>,
    /// `-1` for Official, `+1` for Unofficial.
    pub signs: Vec<f64>,
    pub iterations: usize,
    /// Final maximal KKT violation gap.
    pub gap: f64,
}

pub fn train_svm_smo(
    x: &[SparseVec],
    y: &[Label],
    kernel: &Kernel,
    params: &SmoParams,
) -> Result<SvmModel, ClassifierError> {
    train_svm_smo_detailed(x, y, kernel, params).map(|o| o.model)
}

pub fn train_svm_smo_detailed(
    x: &[SparseVec],
    y: &[Label],
    kernel: &Kernel,
    params: &SmoParams,
) -> Result<SmoOutcome, ClassifierError> {
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(ClassifierError::InvalidParam(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    if params.tol.is_nan() || params.tol <= 0.0 {
        return Err(ClassifierError::InvalidParam("tol must be positive".into()));
    }
    kernel.validate()?;
    check_training_set(x, y)?;
    let signs: Vec<f64> = y.iter().map(|l| sign(*l)).collect();
    let mut solver = Solver::new(kernel_matrix(kernel, x), signs, params);
    solver.simplified_sweeps();
    let gap = solver.polish()?;
    let bias = solver.bias();

    let keep: Vec<usize> = (0..x.len()).filter(|&i| solver.alpha[i] > 0.0).collect();
    let model = SvmModel {
        kernel: *kernel,
        c: params.c,
        bias,
        support_vectors: keep.iter().map(|&i| x[i].clone()).collect(),
        dual_coefs: keep.iter().map(|&i| solver.alpha[i] * solver.y[i]).collect(),
    };
    Ok(SmoOutcome {
        model,
        alphas: solver.alpha,
        signs: solver.y,
        iterations: solver.iterations,
        gap,
    })
}

fn sign(label: Label) -> f64 {
    match label {
        Label::Official => -1.0,
        Label::Unofficial => 1.0,
    }
}

/// Label, margin, and `1 / (1 + exp(-|margin|))`. A zero margin is Official.
pub fn predict_svm(model: &SvmModel, x: &SparseVec) -> (Label, f64, f64) {
    let margin = model.margin(x);
    let label = if margin > 0.0 {
        Label::Unofficial
    } else {
        Label::Official
    };
    (label, margin, 1.0 / (1.0 + (-margin.abs()).exp()))
}

struct Solver<'a> {
    k: Vec<Vec<f64>>,
    y: Vec<f64>,
    alpha: Vec<f64>,
    /// `f_i = sum_j alpha_j y_j K_ij`, without bias.
    f: Vec<f64>,
    b: f64,
    params: &'a SmoParams,
    iterations: usize,
}

impl<'a> Solver<'a> {
    fn new(k: Vec<Vec<f64>>, y: Vec<f64>, params: &'a SmoParams) -> Self {
        let n = y.len();
        Solver {
            k,
            y,
            alpha: vec![0.0; n],
            f: vec![0.0; n],
            b: 0.0,
            params,
            iterations: 0,
        }
    }

    fn simplified_sweeps(&mut self) {
        let n = self.y.len();
        let (c, tol) = (self.params.c, self.params.tol);
        let mut rng = stream(self.params.seed, DOMAIN_SMO, 0);
        let mut passes = 0;
        while passes < self.params.max_passes && self.iterations < self.params.max_iterations / 2 {
            self.iterations += 1;
            let mut changed = 0;
            for i in 0..n {
                let e_i = self.f[i] + self.b - self.y[i];
                let r = self.y[i] * e_i;
                if (r < -tol && self.alpha[i] < c) || (r > tol && self.alpha[i] > 0.0) {
                    let mut j = rng.gen_range(0..n - 1);
                    if j >= i {
                        j += 1;
                    }
                    if self.take_step(i, j, true) {
                        changed += 1;
                    }
                }
            }
            passes = if changed == 0 { passes + 1 } else { 0 };
        }
    }

    /// Returns `(gap, i_low, j_up)` of the maximal violating pair.
    fn violating_pair(&self) -> (f64, usize, usize) {
        let c = self.params.c;
        let (mut low, mut up) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut i_low, mut j_up) = (0, 0);
        for t in 0..self.y.len() {
            let v = self.y[t] - self.f[t];
            let a = self.alpha[t];
            let positive = self.y[t] > 0.0;
            let in_low = if positive { a < c } else { a > 0.0 };
            let in_up = if positive { a > 0.0 } else { a < c };
            if in_low && v > low {
                low = v;
                i_low = t;
            }
            if in_up && v < up {
                up = v;
                j_up = t;
            }
        }
        (low - up, i_low, j_up)
    }

    fn polish(&mut self) -> Result<f64, ClassifierError> {
        loop {
            let (gap, i, j) = self.violating_pair();
            if gap <= self.params.tol || i == j {
                return Ok(gap.max(0.0));
            }
            self.iterations += 1;
            if self.iterations > self.params.max_iterations || !self.take_step(i, j, false) {
                return Err(ClassifierError::NonConvergence {
                    iterations: self.iterations,
                    violation: gap,
                });
            }
        }
    }

    /// Optimizes the pair `(i, j)` analytically. Returns whether anything
    /// moved.
    fn take_step(&mut self, i: usize, j: usize, update_bias: bool) -> bool {
        let c = self.params.c;
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let e_i = self.f[i] + self.b - yi;
        let e_j = self.f[j] + self.b - yj;
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (c + aj - ai).min(c))
        } else {
            ((ai + aj - c).max(0.0), (ai + aj).min(c))
        };
        if hi - lo <= 0.0 {
            return false;
        }
        let (kii, kjj, kij) = (self.k[i][i], self.k[j][j], self.k[i][j]);
        let mut eta = kii + kjj - 2.0 * kij;
        if eta <= 0.0 {
            eta = 1e-12;
        }
        let mut aj_new = (aj + yj * (e_i - e_j) / eta).clamp(lo, hi);
        let snap = 1e-12 * c;
        if aj_new < snap {
            aj_new = 0.0;
        } else if aj_new > c - snap {
            aj_new = c;
        }
        if (aj_new - aj).abs() < 1e-14 * (1.0 + aj.abs()) {
            return false;
        }
        let mut ai_new = ai + yi * yj * (aj - aj_new);
        if ai_new < snap {
            ai_new = 0.0;
        } else if ai_new > c - snap {
            ai_new = c;
        }
        let (di, dj) = (ai_new - ai, aj_new - aj);
        for (t, f) in self.f.iter_mut().enumerate() {
            *f += yi * di * self.k[i][t] + yj * dj * self.k[j][t];
        }
        if update_bias {
            let b1 = self.b - e_i - yi * di * kii - yj * dj * kij;
            let b2 = self.b - e_j - yi * di * kij - yj * dj * kjj;
            self.b = if ai_new > 0.0 && ai_new < c {
                b1
            } else if aj_new > 0.0 && aj_new < c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        true
    }

    /// Average of `y_i - f_i` over free support vectors, else the middle of
    /// the feasible interval.
    fn bias(&self) -> f64 {
        let c = self.params.c;
        let free: Vec<f64> = (0..self.y.len())
            .filter(|&t| self.alpha[t] > 0.0 && self.alpha[t] < c)
            .map(|t| self.y[t] - self.f[t])
            .collect();
        if !free.is_empty() {
            return free.iter().sum::<f64>() / free.len() as f64;
        }
        let (gap, i, _) = self.violating_pair();
        let low = self.y[i] - self.f[i];
        low - gap / 2.0
    }
}
