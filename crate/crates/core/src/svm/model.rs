use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::data::Label;
use crate::error::{Error, Result};

/// A fitted soft-margin SVM: the kernel expansion over its support vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c: f64,
    pub b: f64,
    pub support_x: Vec<Vec<f64>>,
    /// Labels in {-1, +1}.
    pub support_y: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Position of each support vector in the training set it was fit on.
    pub support_indices: Vec<usize>,
}

impl SvmModel {
    pub fn n_support(&self) -> usize {
        self.alpha.len()
    }

    /// Input dimension, if any support vector exists.
    pub fn dim(&self) -> Option<usize> {
        self.support_x.first().map(Vec::len)
    }

    /// Pre-sign score `sum_i y_i alpha_i k(x, x_i) + b`.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim() {
            if d != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: x.len(),
                });
            }
        }
        let sum: f64 = self
            .support_x
            .iter()
            .zip(self.support_y.iter().zip(&self.alpha))
            .map(|(sv, (y, a))| y * a * self.kernel.eval_unchecked(x, sv))
            .sum();
        Ok(sum + self.b)
    }

    /// Conflict iff the decision score is >= 0.
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(if self.decision(x)? >= 0.0 {
            Label::Conflict
        } else {
            Label::Peace
        })
    }

    /// Value of the soft-margin dual objective at the stored coefficients.
    pub fn dual_objective(&self) -> f64 {
        let n = self.alpha.len();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += self.alpha[i]
                    * self.alpha[j]
                    * self.support_y[i]
                    * self.support_y[j]
                    * self
                        .kernel
                        .eval_unchecked(&self.support_x[i], &self.support_x[j]);
            }
        }
        self.alpha.iter().sum::<f64>() - 0.5 * quad
    }

    /// Largest soft-margin KKT residual over the training set the model was
    /// fit on. Points that are not support vectors have `alpha = 0`.
    pub fn kkt_violation(&self, x: &[Vec<f64>], y: &[Label]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let mut alpha = vec![0.0; x.len()];
        for (&idx, &a) in self.support_indices.iter().zip(&self.alpha) {
            if idx >= x.len() {
                return Err(Error::LengthMismatch {
                    left: x.len(),
                    right: idx + 1,
                });
            }
            alpha[idx] = a;
        }
        let mut worst = 0.0f64;
        for ((xi, yi), &a) in x.iter().zip(y).zip(&alpha) {
            let margin = yi.sign() * self.decision(xi)?;
            let residual = if a <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if a >= self.c {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            };
            worst = worst.max(residual);
        }
        Ok(worst)
    }
}

pub fn svm_decision(model: &SvmModel, x: &[f64]) -> Result<f64> {
    model.decision(x)
}

pub fn kkt_violation(model: &SvmModel, x: &[Vec<f64>], y: &[Label]) -> Result<f64> {
    model.kkt_violation(x, y)
}
