//! Stratified k-fold cross-validation and grid search over SVM (C, gamma),
//! plus a cross-validated choice of MLP hidden-unit count.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{accuracy, MlpTrainer, SvmTrainer, Trainer};
use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::mlp::TrainConfig;
use crate::rng::{rng_for, Stream};
use crate::svm::{KernelSpec, SmoConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub k: usize,
    pub seed: u64,
}

impl GridSpec {
    /// C in 2^-2..2^6 and gamma in 2^-4..2^6, ten folds.
    pub fn default_grid(seed: u64) -> Self {
        GridSpec {
            c_values: (-2..=6).map(|e| 2f64.powi(e)).collect(),
            gamma_values: (-4..=6).map(|e| 2f64.powi(e)).collect(),
            k: 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!(
                "k must be >= 2, got {}",
                self.k
            )));
        }
        for (name, values) in [("C", &self.c_values), ("gamma", &self.gamma_values)] {
            if values.is_empty() {
                return Err(Error::InvalidParameter(format!("{name} grid is empty")));
            }
            if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidParameter(format!(
                    "{name} values must be > 0"
                )));
            }
            if values.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "{name} values must be strictly increasing"
                )));
            }
        }
        Ok(())
    }
}

/// Stratified folds over record indices. Each fold is sorted.
///
/// Both classes are shuffled separately and dealt round-robin, conflicts
/// first, so fold sizes differ by at most one and each fold's class split is
/// within one record of the global ratio.
pub fn kfold_indices(labels: &[Label], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > labels.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot split {} records into {k} folds",
            labels.len()
        )));
    }
    let mut rng = rng_for(seed, Stream::Folds);
    let (mut conflict, mut peace): (Vec<usize>, Vec<usize>) =
        (0..labels.len()).partition(|&i| labels[i].is_conflict());
    conflict.shuffle(&mut rng);
    peace.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (pos, idx) in conflict.into_iter().chain(peace).enumerate() {
        folds[pos % k].push(idx);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

pub fn kfold_split(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    kfold_indices(&ds.labels(), k, seed)
}

/// Held-out accuracy of `trainer` on each fold.
pub fn cross_validate(
    trainer: &dyn Trainer,
    x: &[Vec<f64>],
    y: &[Label],
    folds: &[Vec<usize>],
) -> Result<Vec<f64>> {
    let mut in_fold = vec![usize::MAX; x.len()];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            in_fold[i] = f;
        }
    }
    (0..folds.len())
        .map(|f| {
            let (mut tx, mut ty) = (Vec::new(), Vec::new());
            let (mut vx, mut vy) = (Vec::new(), Vec::new());
            for i in 0..x.len() {
                if in_fold[i] == f {
                    vx.push(x[i].clone());
                    vy.push(y[i]);
                } else {
                    tx.push(x[i].clone());
                    ty.push(y[i]);
                }
            }
            let model = trainer.fit(&tx, &ty)?;
            accuracy(&model, &vx, &vy)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellOutcome {
    Scored {
        fold_accuracies: Vec<f64>,
        mean_accuracy: f64,
    },
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub c: f64,
    pub gamma: f64,
    pub outcome: CellOutcome,
}

impl CellResult {
    pub fn mean_accuracy(&self) -> Option<f64> {
        match &self.outcome {
            CellOutcome::Scored { mean_accuracy, .. } => Some(*mean_accuracy),
            CellOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    /// Cells in (C, gamma) order, C outermost.
    pub cells: Vec<CellResult>,
    pub best_c: f64,
    pub best_gamma: f64,
    pub best_mean_accuracy: f64,
    pub k: usize,
    pub seed: u64,
}

impl CvResult {
    pub fn best_cell(&self) -> &CellResult {
        self.cells
            .iter()
            .find(|c| c.c == self.best_c && c.gamma == self.best_gamma)
            .expect("best cell is one of the cells")
    }

    /// `C,gamma,fold_1..fold_k,mean_accuracy` rows, failed cells noted, then
    /// a `# best` summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("C,gamma");
        for f in 1..=self.k {
            let _ = write!(out, ",fold_{f}");
        }
        out.push_str(",mean_accuracy\n");
        for cell in &self.cells {
            let _ = write!(out, "{},{}", cell.c, cell.gamma);
            match &cell.outcome {
                CellOutcome::Scored {
                    fold_accuracies,
                    mean_accuracy,
                } => {
                    for a in fold_accuracies {
                        let _ = write!(out, ",{a}");
                    }
                    let _ = writeln!(out, ",{mean_accuracy}");
                }
                CellOutcome::Failed { reason } => {
                    out.push_str(&",".repeat(self.k));
                    let _ = writeln!(out, ",failed: {}", reason.replace(',', ";"));
                }
            }
        }
        let _ = writeln!(
            out,
            "# best: C={} gamma={} mean_accuracy={}",
            self.best_c, self.best_gamma, self.best_mean_accuracy
        );
        out
    }
}

pub fn evaluate_cell(
    x: &[Vec<f64>],
    y: &[Label],
    folds: &[Vec<usize>],
    c: f64,
    gamma: f64,
    solver: &SmoConfig,
) -> CellResult {
    let trainer = SvmTrainer {
        kernel: KernelSpec::Rbf { gamma },
        c,
        config: *solver,
    };
    let outcome = match cross_validate(&trainer, x, y, folds) {
        Ok(fold_accuracies) => {
            let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
            CellOutcome::Scored {
                fold_accuracies,
                mean_accuracy,
            }
        }
        Err(e) => CellOutcome::Failed {
            reason: e.to_string(),
        },
    };
    CellResult { c, gamma, outcome }
}

/// Highest mean accuracy; ties go to the smaller C, then the smaller gamma.
fn select_best(cells: &[CellResult]) -> Option<&CellResult> {
    let mut best: Option<&CellResult> = None;
    for cell in cells {
        let Some(acc) = cell.mean_accuracy() else {
            continue;
        };
        let better = match best {
            None => true,
            Some(b) => {
                let b_acc = b.mean_accuracy().unwrap();
                acc > b_acc || (acc == b_acc && (cell.c, cell.gamma) < (b.c, b.gamma))
            }
        };
        if better {
            best = Some(cell);
        }
    }
    best
}

pub fn grid_search_xy(
    x: &[Vec<f64>],
    y: &[Label],
    grid: &GridSpec,
    solver: &SmoConfig,
) -> Result<CvResult> {
    grid.validate()?;
    let folds = kfold_indices(y, grid.k, grid.seed)?;
    let pairs: Vec<(f64, f64)> = grid
        .c_values
        .iter()
        .flat_map(|&c| grid.gamma_values.iter().map(move |&g| (c, g)))
        .collect();
    let cells: Vec<CellResult> = pairs
        .par_iter()
        .map(|&(c, g)| evaluate_cell(x, y, &folds, c, g, solver))
        .collect();
    let best = select_best(&cells).ok_or(Error::AllCellsFailed)?;
    Ok(CvResult {
        best_c: best.c,
        best_gamma: best.gamma,
        best_mean_accuracy: best.mean_accuracy().unwrap(),
        k: grid.k,
        seed: grid.seed,
        cells,
    })
}

/// Grid search on a normalized dataset.
pub fn grid_search(ds: &Dataset, grid: &GridSpec, solver: &SmoConfig) -> Result<CvResult> {
    if !ds.is_normalized() {
        return Err(Error::NotNormalized);
    }
    grid_search_xy(&ds.features(), &ds.labels(), grid, solver)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenSearchResult {
    /// `(M, fold accuracies, mean)` per candidate, in input order.
    pub candidates: Vec<(usize, Vec<f64>, f64)>,
    pub best_hidden: usize,
}

/// Cross-validates each hidden-unit count; ties go to the smaller network.
pub fn hidden_units_search(
    ds: &Dataset,
    hidden_values: &[usize],
    config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<HiddenSearchResult> {
    if hidden_values.is_empty() {
        return Err(Error::InvalidParameter("no hidden-unit candidates".into()));
    }
    let (x, y) = (ds.features(), ds.labels());
    let folds = kfold_indices(&y, k, seed)?;
    let candidates = hidden_values
        .par_iter()
        .map(|&hidden| {
            let trainer = MlpTrainer {
                hidden,
                config: *config,
            };
            let accs = cross_validate(&trainer, &x, &y, &folds)?;
            let mean = accs.iter().sum::<f64>() / accs.len() as f64;
            Ok((hidden, accs, mean))
        })
        .collect::<Result<Vec<_>>>()?;
    let best_hidden = candidates
        .iter()
        .fold(None::<&(usize, Vec<f64>, f64)>, |best, cand| match best {
            Some(b) if b.2 > cand.2 || (b.2 == cand.2 && b.0 <= cand.0) => Some(b),
            _ => Some(cand),
        })
        .map(|c| c.0)
        .unwrap();
    Ok(HiddenSearchResult {
        candidates,
        best_hidden,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n_conflict: usize, n_peace: usize) -> Vec<Label> {
        std::iter::repeat_n(Label::Conflict, n_conflict)
            .chain(std::iter::repeat_n(Label::Peace, n_peace))
            .collect()
    }

    #[test]
    fn balanced_thousand_gives_even_folds() {
        let y = labels(500, 500);
        let folds = kfold_indices(&y, 10, 4).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            assert_eq!(f.len(), 100);
            assert_eq!(f.iter().filter(|&&i| y[i].is_conflict()).count(), 50);
        }
    }

    #[test]
    fn folds_partition_the_records() {
        let y = labels(37, 64);
        let folds = kfold_indices(&y, 7, 1).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let ratio = 37.0 / 101.0;
        for f in &folds {
            let c = f.iter().filter(|&&i| y[i].is_conflict()).count() as f64;
            assert!((c - ratio * f.len() as f64).abs() <= 1.0);
        }
    }

    #[test]
    fn leave_one_out_and_too_many_folds() {
        let y = labels(3, 3);
        let folds = kfold_indices(&y, 6, 0).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
        assert!(kfold_indices(&y, 7, 0).is_err());
    }

    #[test]
    fn grid_validation() {
        let mut g = GridSpec::default_grid(0);
        assert!(g.validate().is_ok());
        assert!(g.c_values.contains(&1.0));
        g.gamma_values = vec![2.0, 1.0];
        assert!(g.validate().is_err());
        g.gamma_values = vec![];
        assert!(g.validate().is_err());
        let g = GridSpec {
            k: 1,
            ..GridSpec::default_grid(0)
        };
        assert!(g.validate().is_err());
    }

    fn cell(c: f64, gamma: f64, accs: &[f64]) -> CellResult {
        CellResult {
            c,
            gamma,
            outcome: CellOutcome::Scored {
                fold_accuracies: accs.to_vec(),
                mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
            },
        }
    }

    #[test]
    fn ties_prefer_smaller_c_then_gamma() {
        let cells = vec![
            cell(1.0, 4.0, &[0.8, 0.9]),
            cell(1.0, 2.0, &[0.8, 0.9]),
            cell(2.0, 1.0, &[0.8, 0.9]),
            CellResult {
                c: 0.5,
                gamma: 1.0,
                outcome: CellOutcome::Failed { reason: "x".into() },
            },
        ];
        let best = select_best(&cells).unwrap();
        assert_eq!((best.c, best.gamma), (1.0, 2.0));
        assert!(select_best(&cells[3..]).is_none());
    }
}
