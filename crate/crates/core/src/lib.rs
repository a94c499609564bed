//! Conflict prediction from dyad-year data.
//!
//! Two classifier families share one pipeline:
//!
//! * [`mlp`]: a two-layer feed-forward network (tanh hidden units, logistic
//!   output) trained by scaled conjugate gradient;
//! * [`svm`]: a soft-margin kernel SVM whose dual is solved by sequential
//!   minimal optimization.
//!
//! Around them sit data handling ([`data`]), cross-validated grid search
//! ([`selection`]), ROC/AUC statistics ([`evaluation`]) and variable
//! sensitivity experiments ([`sensitivity`]).

pub mod classifier;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod mlp;
pub mod model_io;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod selection;
pub mod sensitivity;
pub mod svm;

pub use classifier::{Classifier, Family, MlpTrainer, SvmTrainer, TrainedModel, Trainer};
pub use data::{Dataset, DyadRecord, Label, Normalizer, SpecSet, Variable, VariableSpec};
pub use error::{Error, Result};
pub use evaluation::{AucComparison, ConfusionMatrix, RocCurve};
pub use mlp::{MlpNetwork, TrainConfig};
pub use model_io::ModelFile;
pub use selection::{CvResult, GridSpec};
pub use sensitivity::{ExtremeProfile, PerturbationReport, RankingTable};
pub use svm::{KernelSpec, SmoConfig, SvmModel};
