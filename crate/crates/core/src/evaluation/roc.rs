use std::fmt::Write as _;

use crate::data::Label;
use crate::error::{Error, Result};

/// ROC curve from `(0, 0)` to `(1, 1)`; one point per distinct score.
///
/// Integer counts are kept alongside the rates so the trapezoidal area can be
/// formed exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// `(false-positive rate, sensitivity)` pairs.
    pub points: Vec<(f64, f64)>,
    /// Score cut-point of each point (`+inf` for the origin). A record counts
    /// as conflict at a point when its score is `>=` the threshold.
    pub thresholds: Vec<f64>,
    true_conflicts: Vec<u64>,
    false_conflicts: Vec<u64>,
    n_conflict: u64,
    n_peace: u64,
}

impl RocCurve {
    pub fn n_conflict(&self) -> usize {
        self.n_conflict as usize
    }

    pub fn n_peace(&self) -> usize {
        self.n_peace as usize
    }

    /// `threshold<TAB>fpr<TAB>sensitivity`, one row per point.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("threshold\tfpr\tsensitivity\n");
        for (t, (fpr, tpr)) in self.thresholds.iter().zip(&self.points) {
            let _ = writeln!(out, "{t}\t{fpr}\t{tpr}");
        }
        out
    }
}

pub fn roc_points(scores: &[f64], actual: &[Label]) -> Result<RocCurve> {
    if scores.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: actual.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("ROC scores must be finite".into()));
    }
    let n_conflict = actual.iter().filter(|l| l.is_conflict()).count() as u64;
    let n_peace = actual.len() as u64 - n_conflict;
    if n_conflict == 0 || n_peace == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut curve = RocCurve {
        points: vec![(0.0, 0.0)],
        thresholds: vec![f64::INFINITY],
        true_conflicts: vec![0],
        false_conflicts: vec![0],
        n_conflict,
        n_peace,
    };
    let (mut tc, mut fc) = (0u64, 0u64);
    let mut k = 0;
    while k < order.len() {
        let threshold = scores[order[k]];
        while k < order.len() && scores[order[k]] == threshold {
            if actual[order[k]].is_conflict() {
                tc += 1;
            } else {
                fc += 1;
            }
            k += 1;
        }
        curve
            .points
            .push((fc as f64 / n_peace as f64, tc as f64 / n_conflict as f64));
        curve.thresholds.push(threshold);
        curve.true_conflicts.push(tc);
        curve.false_conflicts.push(fc);
    }
    Ok(curve)
}

/// Trapezoidal area under the curve.
///
/// Summed in integer counts, so the result equals the Mann-Whitney pair
/// statistic with half-credit ties bit for bit.
pub fn auc(curve: &RocCurve) -> f64 {
    let mut twice_area: u128 = 0;
    for k in 1..curve.true_conflicts.len() {
        let dfc = (curve.false_conflicts[k] - curve.false_conflicts[k - 1]) as u128;
        let tc_sum = (curve.true_conflicts[k] + curve.true_conflicts[k - 1]) as u128;
        twice_area += dfc * tc_sum;
    }
    twice_area as f64 / (2 * curve.n_conflict as u128 * curve.n_peace as u128) as f64
}

/// Convenience: build the curve and integrate it.
pub fn auc_of_scores(scores: &[f64], actual: &[Label]) -> Result<f64> {
    roc_points(scores, actual).map(|c| auc(&c))
}
