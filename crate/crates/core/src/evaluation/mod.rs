//! Confusion matrices, ROC curves, AUC and the correlated-AUC z test.

mod confusion;
mod roc;
mod stats;

pub use confusion::{confusion, ConfusionMatrix};
pub use roc::{auc, auc_of_scores, roc_points, RocCurve};
pub use stats::{
    auc_standard_error, auc_z_test, binormal_auc_correlation, estimate_auc_correlation, spearman,
    AucComparison, Z_CRITICAL_95,
};
