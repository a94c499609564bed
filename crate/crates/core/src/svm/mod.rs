//! Soft-margin kernel SVM trained by sequential minimal optimization.

mod kernel;
mod model;
mod smo;

pub use kernel::{kernel_eval, KernelSpec};
pub use model::{kkt_violation, svm_decision, SvmModel};
pub use smo::{smo_solve, smo_solve_traced, SmoConfig, SmoTrace, GRAM_CACHE_LIMIT, HARD_MARGIN_C};
