use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

/// Two-by-two outcome table with conflict as the positive class.
///
/// Field names follow the conflict-prediction vocabulary: `tc` true conflict
/// (TP in the usual sense), `fp` false peace (FN), `tp` true peace (TN) and
/// `fc` false conflict (FP).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tc: usize,
    pub fp: usize,
    pub tp: usize,
    pub fc: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tc + self.fp + self.tp + self.fc
    }

    pub fn actual_conflicts(&self) -> usize {
        self.tc + self.fp
    }

    pub fn actual_peaces(&self) -> usize {
        self.tp + self.fc
    }

    pub fn predicted_conflicts(&self) -> usize {
        self.tc + self.fc
    }

    pub fn predicted_peaces(&self) -> usize {
        self.tp + self.fp
    }

    /// Sensitivity, `tc / (tc + fp)`. NaN without conflicts.
    pub fn conflict_accuracy(&self) -> f64 {
        self.tc as f64 / self.actual_conflicts() as f64
    }

    /// Specificity, `tp / (tp + fc)`. NaN without peaces.
    pub fn peace_accuracy(&self) -> f64 {
        self.tp as f64 / self.actual_peaces() as f64
    }

    pub fn accuracy(&self) -> f64 {
        (self.tc + self.tp) as f64 / self.total() as f64
    }

    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Conflict, Label::Conflict) => self.tc += 1,
            (Label::Peace, Label::Conflict) => self.fp += 1,
            (Label::Peace, Label::Peace) => self.tp += 1,
            (Label::Conflict, Label::Peace) => self.fc += 1,
        }
    }

    /// Aligned text block with the four counts and both class accuracies.
    pub fn report(&self, method: &str) -> String {
        format!(
            "{:<24}{:>8}{:>8}{:>8}{:>8}\n{:<24}{:>8}{:>8}{:>8}{:>8}\n\
             conflict accuracy: {:.4}\npeace accuracy:    {:.4}\n",
            "Method",
            "TC",
            "FP",
            "TP",
            "FC",
            method,
            self.tc,
            self.fp,
            self.tp,
            self.fc,
            self.conflict_accuracy(),
            self.peace_accuracy(),
        )
    }
}

pub fn confusion(predicted: &[Label], actual: &[Label]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        cm.record(p, a);
    }
    Ok(cm)
}
