//! Two-layer feed-forward network trained by scaled conjugate gradient.

mod network;
mod scg;

pub use network::{logistic, mlp_forward, mlp_loss_grad, mlp_predict, MlpNetwork, PROB_EPS};
pub use scg::{scg_minimize, scg_train, scg_train_traced, train_mlp, TrainConfig, TrainTrace};
