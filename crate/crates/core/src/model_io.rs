//! Model files: pretty-printed JSON holding the model, the normalization it
//! expects and the training seed. Floats are written in shortest round-trip
//! form and parsed exactly, so save/load is bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::TrainedModel;
use crate::data::Normalizer;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "dispute-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    /// `tanh`/`logistic` for MLPs; absent for SVMs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activations: Option<Activations>,
    pub normalizer: Option<Normalizer>,
    pub model: TrainedModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activations {
    pub inner: String,
    pub outer: String,
}

impl ModelFile {
    pub fn new(model: TrainedModel, normalizer: Option<Normalizer>, seed: u64) -> Self {
        let activations = matches!(model, TrainedModel::Mlp(_)).then(|| Activations {
            inner: "tanh".into(),
            outer: "logistic".into(),
        });
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            seed,
            activations,
            normalizer,
            model,
        }
    }

    pub fn to_text(&self) -> Result<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| Error::ModelFormat(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!(
                "unexpected format `{}`",
                file.format
            )));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {}",
                file.version
            )));
        }
        if let TrainedModel::Mlp(net) = &file.model {
            let shapes_ok = net.inputs >= 1
                && net.hidden >= 1
                && net.w1.len() == net.inputs * net.hidden
                && net.b1.len() == net.hidden
                && net.w2.len() == net.hidden;
            if !shapes_ok {
                return Err(Error::ModelFormat(
                    "MLP weight shapes are inconsistent".into(),
                ));
            }
        }
        if let TrainedModel::Svm(m) = &file.model {
            let n = m.alpha.len();
            if m.support_x.len() != n || m.support_y.len() != n || m.support_indices.len() != n {
                return Err(Error::ModelFormat(
                    "SVM support arrays differ in length".into(),
                ));
            }
        }
        Ok(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}
