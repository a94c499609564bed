//! Variable-influence experiments.
//!
//! * Experiment one probes a model with 14 extreme profiles: one variable at
//!   its maximum with every other variable at its minimum, and the mirror.
//! * Experiment two overwrites one variable across the whole test set with
//!   its minimum or maximum and recounts the predictions.
//! * The single-variable ranking retrains on each variable alone and ranks
//!   variables by test AUC.
//!
//! "Minimum" and "maximum" are the canonical bounds of each variable, taken
//! from the training normalizer, so in model space they are exactly 0 and 1.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, Trainer};
use crate::data::{Dataset, Label, Normalizer, SpecSet, Variable, N_VARIABLES};
use crate::error::{Error, Result};
use crate::evaluation::auc_of_scores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Min => "min",
            Direction::Max => "max",
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Min => Direction::Max,
            Direction::Max => Direction::Min,
        }
    }

    fn bound(self, specs: &SpecSet, v: Variable) -> f64 {
        let s = specs.get(v);
        match self {
            Direction::Min => s.canonical_min,
            Direction::Max => s.canonical_max,
        }
    }
}

/// Raw-space input with the probed variable at one extreme and every other
/// variable at the opposite one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeProfile {
    pub variable: Variable,
    pub direction: Direction,
    pub vector: [f64; N_VARIABLES],
}

impl ExtremeProfile {
    pub fn new(specs: &SpecSet, variable: Variable, direction: Direction) -> Self {
        let mut vector = [0.0; N_VARIABLES];
        for v in Variable::ALL {
            let d = if v == variable {
                direction
            } else {
                direction.opposite()
            };
            vector[v.index()] = d.bound(specs, v);
        }
        ExtremeProfile {
            variable,
            direction,
            vector,
        }
    }

    pub fn name(&self) -> String {
        format!("{}-{}", self.variable.short_name(), self.direction.as_str())
    }
}

/// All 14 profiles: per variable, max-against-min then min-against-max.
pub fn extreme_profiles(specs: &SpecSet) -> Vec<ExtremeProfile> {
    Variable::ALL
        .into_iter()
        .flat_map(|v| [Direction::Max, Direction::Min].map(|d| ExtremeProfile::new(specs, v, d)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOutcome {
    pub profile: ExtremeProfile,
    pub score: f64,
    pub label: Label,
}

fn check_seven(model: &dyn Classifier) -> Result<()> {
    match model.input_dim() {
        Some(d) if d != N_VARIABLES => Err(Error::DimensionMismatch {
            expected: N_VARIABLES,
            actual: d,
        }),
        _ => Ok(()),
    }
}

pub fn experiment_one(
    model: &dyn Classifier,
    normalizer: &Normalizer,
) -> Result<Vec<ProfileOutcome>> {
    check_seven(model)?;
    extreme_profiles(&normalizer.specs)
        .into_iter()
        .map(|profile| {
            let x = normalizer.transform(&profile.vector);
            Ok(ProfileOutcome {
                profile,
                score: model.score(&x)?,
                label: model.predict(&x)?,
            })
        })
        .collect()
}

pub fn experiment_one_text(outcomes: &[ProfileOutcome]) -> String {
    let mut out = format!("{:<14}{:>14}  {}\n", "Profile", "Score", "Prediction");
    for o in outcomes {
        let _ = writeln!(
            out,
            "{:<14}{:>14.6}  {}",
            o.profile.name(),
            o.score,
            o.label
        );
    }
    out
}

pub fn experiment_one_csv(outcomes: &[ProfileOutcome]) -> String {
    let mut out = String::from("variable,direction,score,prediction\n");
    for o in outcomes {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            o.profile.variable.column(),
            o.profile.direction.as_str(),
            o.score,
            o.label
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    /// `None` for the unperturbed baseline.
    pub perturbation: Option<(Variable, Direction)>,
    pub peace: usize,
    pub conflict: usize,
}

impl PerturbationRow {
    pub fn name(&self) -> String {
        match self.perturbation {
            None => "Test set results".into(),
            Some((v, d)) => format!("{}-{}", v.short_name(), d.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// Baseline first, then min and max for each variable.
    pub rows: Vec<PerturbationRow>,
    pub test_size: usize,
}

impl PerturbationReport {
    pub fn baseline(&self) -> &PerturbationRow {
        &self.rows[0]
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{:<18}{:>8}{:>8}\n", "Variable", "Peace", "War");
        for r in &self.rows {
            let _ = writeln!(out, "{:<18}{:>8}{:>8}", r.name(), r.peace, r.conflict);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable,direction,peace,conflict\n");
        for r in &self.rows {
            let (v, d) = match r.perturbation {
                None => ("baseline", ""),
                Some((v, d)) => (v.column(), d.as_str()),
            };
            let _ = writeln!(out, "{v},{d},{},{}", r.peace, r.conflict);
        }
        out
    }
}

fn count(model: &dyn Classifier, rows: &[Vec<f64>]) -> Result<PerturbationRow> {
    let mut conflict = 0;
    for x in rows {
        if model.predict(x)?.is_conflict() {
            conflict += 1;
        }
    }
    Ok(PerturbationRow {
        perturbation: None,
        peace: rows.len() - conflict,
        conflict,
    })
}

/// Counts predictions on the (normalized) test set, then again with each
/// variable pinned to each extreme for every record.
pub fn experiment_two(model: &dyn Classifier, test: &Dataset) -> Result<PerturbationReport> {
    let normalizer = test.normalizer().ok_or(Error::NotNormalized)?;
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_seven(model)?;
    let base = test.features();
    let perturbations: Vec<Option<(Variable, Direction)>> = std::iter::once(None)
        .chain(
            Variable::ALL
                .into_iter()
                .flat_map(|v| [Direction::Min, Direction::Max].map(|d| Some((v, d)))),
        )
        .collect();
    let rows = perturbations
        .par_iter()
        .map(|&p| {
            let mut row = match p {
                None => count(model, &base)?,
                Some((v, d)) => {
                    let pinned = normalizer.scale(v, d.bound(&normalizer.specs, v));
                    let rows: Vec<Vec<f64>> = base
                        .iter()
                        .map(|x| {
                            let mut x = x.clone();
                            x[v.index()] = pinned;
                            x
                        })
                        .collect();
                    count(model, &rows)?
                }
            };
            row.perturbation = p;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PerturbationReport {
        rows,
        test_size: test.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub rank: usize,
    pub variable: Variable,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub rows: Vec<RankingRow>,
    /// Variables whose single-variable training failed, with the reason.
    pub failed: Vec<(Variable, String)>,
}

impl RankingTable {
    pub fn to_text(&self) -> String {
        let mut out = format!("{:<6}{:<14}{:>8}\n", "Rank", "Variable", "AUC");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<6}{:<14}{:>8.4}",
                r.rank,
                r.variable.display_name(),
                r.auc
            );
        }
        for (v, why) in &self.failed {
            let _ = writeln!(out, "{:<6}{:<14}  failed: {why}", "-", v.display_name());
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,variable,auc\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.rank, r.variable.column(), r.auc);
        }
        for (v, why) in &self.failed {
            let _ = writeln!(out, ",{},failed: {}", v.column(), why.replace(',', ";"));
        }
        out
    }
}

/// Trains on each variable alone and ranks the variables by test AUC.
pub fn single_variable_ranking(
    trainer: &dyn Trainer,
    train: &Dataset,
    test: &Dataset,
) -> Result<RankingTable> {
    single_variable_ranking_ordered(trainer, train, test, &Variable::ALL)
}

/// As [`single_variable_ranking`], processing variables in `order`. The table
/// does not depend on the order.
pub fn single_variable_ranking_ordered(
    trainer: &dyn Trainer,
    train: &Dataset,
    test: &Dataset,
    order: &[Variable],
) -> Result<RankingTable> {
    if !train.is_normalized() || !test.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let (y_train, y_test) = (train.labels(), test.labels());
    let results: Vec<(Variable, Result<f64>)> = order
        .par_iter()
        .map(|&v| {
            let auc = trainer
                .fit(&train.feature_column(v), &y_train)
                .and_then(|model| model.scores(&test.feature_column(v)))
                .and_then(|scores| auc_of_scores(&scores, &y_test));
            (v, auc)
        })
        .collect();

    let mut scored = Vec::new();
    let mut failed = Vec::new();
    for (v, r) in results {
        match r {
            Ok(a) => scored.push((v, a)),
            Err(e) => failed.push((v, e.to_string())),
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    failed.sort_by_key(|(v, _)| *v);
    Ok(RankingTable {
        rows: scored
            .into_iter()
            .enumerate()
            .map(|(i, (variable, auc))| RankingRow {
                rank: i + 1,
                variable,
                auc,
            })
            .collect(),
        failed,
    })
}
