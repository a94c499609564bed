//! Common interface over the two model families.

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::mlp::{train_mlp, MlpNetwork, TrainConfig};
use crate::svm::{smo_solve, KernelSpec, SmoConfig, SvmModel};

/// Default MLP decision threshold on P(conflict).
pub const MLP_THRESHOLD: f64 = 0.5;

pub trait Classifier: Send + Sync {
    /// Expected input length; `None` when the model accepts any length.
    fn input_dim(&self) -> Option<usize>;

    /// Continuous score, larger meaning more conflict-like.
    fn score(&self, x: &[f64]) -> Result<f64>;

    fn predict(&self, x: &[f64]) -> Result<Label>;

    fn scores(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.score(x)).collect()
    }

    fn predict_all(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

impl Classifier for MlpNetwork {
    fn input_dim(&self) -> Option<usize> {
        Some(self.inputs)
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        self.forward(x)
    }

    fn predict(&self, x: &[f64]) -> Result<Label> {
        MlpNetwork::predict(self, x, MLP_THRESHOLD)
    }
}

impl Classifier for SvmModel {
    fn input_dim(&self) -> Option<usize> {
        self.dim()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        self.decision(x)
    }

    fn predict(&self, x: &[f64]) -> Result<Label> {
        SvmModel::predict(self, x)
    }
}

/// A trained model of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TrainedModel {
    Mlp(MlpNetwork),
    Svm(SvmModel),
}

impl TrainedModel {
    pub fn family(&self) -> Family {
        match self {
            TrainedModel::Mlp(_) => Family::Mlp,
            TrainedModel::Svm(_) => Family::Svm,
        }
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            TrainedModel::Mlp(m) => m,
            TrainedModel::Svm(m) => m,
        }
    }
}

impl Classifier for TrainedModel {
    fn input_dim(&self) -> Option<usize> {
        self.inner().input_dim()
    }

    fn score(&self, x: &[f64]) -> Result<f64> {
        self.inner().score(x)
    }

    fn predict(&self, x: &[f64]) -> Result<Label> {
        self.inner().predict(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Mlp,
    Svm,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Mlp => "mlp",
            Family::Svm => "svm",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mlp" => Ok(Family::Mlp),
            "svm" => Ok(Family::Svm),
            other => Err(Error::InvalidParameter(format!(
                "unknown model family `{other}`"
            ))),
        }
    }
}

/// A training procedure with fixed hyperparameters.
pub trait Trainer: Send + Sync {
    fn fit(&self, x: &[Vec<f64>], y: &[Label]) -> Result<TrainedModel>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpTrainer {
    pub hidden: usize,
    pub config: TrainConfig,
}

impl Trainer for MlpTrainer {
    fn fit(&self, x: &[Vec<f64>], y: &[Label]) -> Result<TrainedModel> {
        train_mlp(x, y, self.hidden, &self.config).map(|(net, _)| TrainedModel::Mlp(net))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmTrainer {
    pub kernel: KernelSpec,
    pub c: f64,
    pub config: SmoConfig,
}

impl Trainer for SvmTrainer {
    fn fit(&self, x: &[Vec<f64>], y: &[Label]) -> Result<TrainedModel> {
        smo_solve(x, y, self.kernel, self.c, &self.config).map(TrainedModel::Svm)
    }
}

/// Fraction of `xs` whose prediction matches `y`.
pub fn accuracy(model: &dyn Classifier, xs: &[Vec<f64>], y: &[Label]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predicted = model.predict_all(xs)?;
    let hits = predicted.iter().zip(y).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / xs.len() as f64)
}
