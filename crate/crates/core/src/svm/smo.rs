//! Sequential minimal optimization for the soft-margin dual
//!
//! ```text
//! max_a  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j k(x_i, x_j)
//! s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0
//! ```
//!
//! Internally the solver minimizes the negated objective `f(a) = 1/2 a'Qa - e'a`
//! with `Q_ij = y_i y_j k(x_i, x_j)` and keeps the gradient `G = Qa - e`
//! up to date. Each step picks the maximal violating pair
//!
//! ```text
//! i = argmax { -y_t G_t : t in I_up },  j = argmin { -y_t G_t : t in I_low }
//! ```
//!
//! and solves the two-variable subproblem exactly, clipped to the box and the
//! equality constraint. The solver stops once `m - M = -y_i G_i + y_j G_j`
//! drops to `kkt_tol`, which bounds every per-point KKT residual by `kkt_tol`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::model::SvmModel;
use crate::data::Label;
use crate::error::{Error, Result};
use crate::rng::{rng_for, Stream};

/// Soft-margin C standing in for the hard-margin problem.
pub const HARD_MARGIN_C: f64 = 1e6;

/// Full Gram matrix is cached up to this many training points.
pub const GRAM_CACHE_LIMIT: usize = 5000;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoConfig {
    pub kkt_tol: f64,
    /// Budget in passes; one pass is `n` pair updates.
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SmoConfig {
    fn default() -> Self {
        SmoConfig {
            kkt_tol: 1e-3,
            max_passes: 1000,
            seed: 0,
        }
    }
}

impl SmoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kkt_tol.is_nan() || self.kkt_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kkt_tol must be > 0, got {}",
                self.kkt_tol
            )));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max_passes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Solver diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SmoTrace {
    pub iterations: usize,
    /// Final `m - M` gap.
    pub gap: f64,
    /// Dual objective after each pair update (only when requested).
    pub objective: Vec<f64>,
}

enum Gram<'a> {
    Cached {
        n: usize,
        k: Vec<f64>,
    },
    OnTheFly {
        x: &'a [Vec<f64>],
        kernel: KernelSpec,
    },
}

impl Gram<'_> {
    fn new(x: &[Vec<f64>], kernel: KernelSpec) -> Gram<'_> {
        let n = x.len();
        if n <= GRAM_CACHE_LIMIT {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval_unchecked(&x[i], &x[j]);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            Gram::Cached { n, k }
        } else {
            Gram::OnTheFly { x, kernel }
        }
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        match self {
            Gram::Cached { n, k } => out.copy_from_slice(&k[i * n..(i + 1) * n]),
            Gram::OnTheFly { x, kernel } => {
                for (o, xj) in out.iter_mut().zip(x.iter()) {
                    *o = kernel.eval_unchecked(&x[i], xj);
                }
            }
        }
    }
}

fn validate_inputs(x: &[Vec<f64>], y: &[Label], kernel: &KernelSpec, c: f64) -> Result<()> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    kernel.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("C must be > 0, got {c}")));
    }
    let d = x[0].len();
    for xi in x {
        if xi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: xi.len(),
            });
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite input value".into()));
        }
    }
    let positives = y.iter().filter(|l| l.is_conflict()).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn smo_solve(
    x: &[Vec<f64>],
    y: &[Label],
    kernel: KernelSpec,
    c: f64,
    cfg: &SmoConfig,
) -> Result<SvmModel> {
    solve(x, y, kernel, c, cfg, false).map(|(m, _)| m)
}

/// As [`smo_solve`], also recording the dual objective after every update.
pub fn smo_solve_traced(
    x: &[Vec<f64>],
    y: &[Label],
    kernel: KernelSpec,
    c: f64,
    cfg: &SmoConfig,
) -> Result<(SvmModel, SmoTrace)> {
    solve(x, y, kernel, c, cfg, true)
}

fn solve(
    x: &[Vec<f64>],
    labels: &[Label],
    kernel: KernelSpec,
    c: f64,
    cfg: &SmoConfig,
    record: bool,
) -> Result<(SvmModel, SmoTrace)> {
    validate_inputs(x, labels, &kernel, c)?;
    cfg.validate()?;

    let n = x.len();
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let gram = Gram::new(x, kernel);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut row_i = vec![0.0; n];
    let mut row_j = vec![0.0; n];

    // Scan order fixes which index wins among exact ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(cfg.seed, Stream::SmoTieBreak));

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let max_iter = cfg.max_passes.saturating_mul(n.max(1));
    let mut trace = SmoTrace::default();
    let mut iter = 0usize;
    loop {
        let mut i = usize::MAX;
        let mut j = usize::MAX;
        let mut m_up = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for &t in &order {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > m_up {
                m_up = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < m_low {
                m_low = v;
                j = t;
            }
        }
        let gap = m_up - m_low;
        trace.gap = gap.max(0.0);
        if i == usize::MAX || j == usize::MAX || gap <= cfg.kkt_tol {
            break;
        }
        if iter >= max_iter {
            return Err(Error::NotConverged {
                passes: cfg.max_passes,
                violation: gap,
            });
        }
        iter += 1;

        gram.row(i, &mut row_i);
        gram.row(j, &mut row_j);
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (kii, kjj, kij) = (row_i[i], row_j[j], row_i[j]);
        let (mut ai, mut aj) = (old_ai, old_aj);

        if y[i] != y[j] {
            let quad = (kii + kjj - 2.0 * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = (kii + kjj - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let (dai, daj) = (ai - old_ai, aj - old_aj);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * row_i[t] * dai + y[j] * row_j[t] * daj);
        }
        if record {
            let obj: f64 = alpha
                .iter()
                .zip(&grad)
                .map(|(a, g)| 0.5 * a * (1.0 - g))
                .sum();
            trace.objective.push(obj);
        }
    }
    trace.iterations = iter;

    let b = bias(&alpha, &grad, &y, c);
    let mut model = SvmModel {
        kernel,
        c,
        b,
        support_x: Vec::new(),
        support_y: Vec::new(),
        alpha: Vec::new(),
        support_indices: Vec::new(),
    };
    for t in (0..n).filter(|&t| alpha[t] > 0.0) {
        model.support_x.push(x[t].clone());
        model.support_y.push(y[t]);
        model.alpha.push(alpha[t]);
        model.support_indices.push(t);
    }
    Ok((model, trace))
}

/// Mean of `y_t - f0(x_t)` over free vectors; midpoint of the feasible
/// interval when every vector sits at a bound.
fn bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut sum = 0.0;
    let mut n_free = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        if alpha[t] > 0.0 && alpha[t] < c {
            sum += v;
            n_free += 1;
        } else if (y[t] > 0.0) == (alpha[t] <= 0.0) {
            // y=+1 at 0 or y=-1 at C: b >= v
            lower = lower.max(v);
        } else {
            upper = upper.min(v);
        }
    }
    if n_free > 0 {
        sum / n_free as f64
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower
    } else {
        upper
    }
}
