//! Scaled conjugate gradient (Møller, 1993) for batch training of
//! [`MlpNetwork`].
//!
//! SCG replaces the line search of ordinary conjugate gradient with a
//! Levenberg-Marquardt style scale `lambda` applied to a finite-difference
//! estimate of the Hessian-vector product. A step is accepted only when the
//! comparison ratio `Delta` is non-negative, i.e. when the loss did not rise,
//! so the losses at accepted steps form a non-increasing sequence.

use serde::{Deserialize, Serialize};

use super::network::MlpNetwork;
use crate::data::{Dataset, Label};
use crate::error::{Error, Result};

const LAMBDA_MIN: f64 = 1e-15;
const LAMBDA_MAX: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Number of SCG iterations (accepted or rejected).
    pub cycles: usize,
    pub seed: u64,
    /// Step constant for the Hessian-vector finite difference.
    pub sigma0: f64,
    /// Initial scale.
    pub lambda0: f64,
    /// Stop once the gradient norm falls below this.
    pub grad_tol: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            cycles: 100,
            seed: 0,
            sigma0: 1e-4,
            lambda0: 1e-6,
            grad_tol: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(Error::InvalidParameter("cycles must be >= 1".into()));
        }
        for (name, v) in [
            ("sigma0", self.sigma0),
            ("lambda0", self.lambda0),
            ("grad_tol", self.grad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// What happened during one training run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    /// Loss at the initial weights followed by the loss after every accepted step.
    pub losses: Vec<f64>,
    pub iterations: usize,
    pub accepted: usize,
    pub final_grad_norm: f64,
}

impl TrainTrace {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().unwrap_or(&f64::NAN)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(base: &[f64], alpha: f64, dir: &[f64]) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, d)| b + alpha * d).collect()
}

/// Minimizes `objective` from `w0` with SCG. The objective returns the loss
/// and its gradient.
pub fn scg_minimize<F>(
    w0: Vec<f64>,
    cfg: &TrainConfig,
    mut objective: F,
) -> Result<(Vec<f64>, TrainTrace)>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    cfg.validate()?;
    let n = w0.len();
    let mut w = w0;
    let (mut f_old, grad) = objective(&w)?;
    if !f_old.is_finite() {
        return Err(Error::NonFiniteLoss { iteration: 0 });
    }
    let mut trace = TrainTrace {
        losses: vec![f_old],
        ..TrainTrace::default()
    };

    // r: negative gradient (steepest descent), p: search direction.
    let mut r: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut lambda = cfg.lambda0;
    let mut lambda_bar = 0.0;
    let mut success = true;
    let mut delta = 0.0;
    let mut mu = 0.0;
    let mut p_norm2 = dot(&p, &p);
    let mut since_restart = 0usize;

    trace.final_grad_norm = dot(&r, &r).sqrt();
    if trace.final_grad_norm < cfg.grad_tol {
        return Ok((w, trace));
    }

    for k in 1..=cfg.cycles {
        trace.iterations = k;
        if success {
            mu = dot(&p, &r);
            if mu <= 0.0 {
                // Not a descent direction; fall back to steepest descent.
                p.clone_from(&r);
                mu = dot(&p, &r);
                since_restart = 0;
            }
            p_norm2 = dot(&p, &p);
            let sigma = cfg.sigma0 / p_norm2.sqrt();
            let (_, g_probe) = objective(&axpy(&w, sigma, &p))?;
            // s = (E'(w + sigma p) - E'(w)) / sigma, and E'(w) = -r.
            delta = p
                .iter()
                .zip(g_probe.iter().zip(&r))
                .map(|(pi, (gp, ri))| pi * (gp + ri) / sigma)
                .sum();
        }

        // Scale the curvature estimate, forcing it positive.
        delta += (lambda - lambda_bar) * p_norm2;
        if delta <= 0.0 {
            lambda_bar = 2.0 * (lambda - delta / p_norm2);
            delta = -delta + lambda * p_norm2;
            lambda = lambda_bar;
        }

        let alpha = mu / delta;
        let w_new = axpy(&w, alpha, &p);
        let (f_new, g_new) = objective(&w_new)?;
        if !f_new.is_finite() {
            return Err(Error::NonFiniteLoss { iteration: k });
        }
        let comparison = 2.0 * delta * (f_old - f_new) / (mu * mu);

        if comparison >= 0.0 {
            w = w_new;
            f_old = f_new;
            trace.losses.push(f_new);
            trace.accepted += 1;
            lambda_bar = 0.0;
            success = true;

            let r_new: Vec<f64> = g_new.iter().map(|g| -g).collect();
            since_restart += 1;
            if since_restart >= n {
                p.clone_from(&r_new);
                since_restart = 0;
            } else {
                let beta = (dot(&r_new, &r_new) - dot(&r_new, &r)) / mu;
                p = axpy(&r_new, beta, &p);
            }
            r = r_new;
            if comparison >= 0.75 {
                lambda = (lambda / 4.0).max(LAMBDA_MIN);
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }

        if comparison < 0.25 {
            lambda = (lambda + delta * (1.0 - comparison) / p_norm2).min(LAMBDA_MAX);
        }

        trace.final_grad_norm = dot(&r, &r).sqrt();
        if trace.final_grad_norm < cfg.grad_tol {
            break;
        }
    }
    Ok((w, trace))
}

/// Trains a fresh network on raw feature rows. Targets: conflict = 1.
pub fn train_mlp(
    x: &[Vec<f64>],
    labels: &[Label],
    hidden: usize,
    cfg: &TrainConfig,
) -> Result<(MlpNetwork, TrainTrace)> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: labels.len(),
        });
    }
    cfg.validate()?;
    let targets: Vec<f64> = labels.iter().map(|l| l.target()).collect();
    let mut net = MlpNetwork::random(x[0].len(), hidden, cfg.seed)?;
    let mut scratch = net.clone();
    let (w, trace) = scg_minimize(net.params(), cfg, |params| {
        scratch.set_params(params);
        scratch.loss_grad(x, &targets)
    })?;
    net.set_params(&w);
    Ok((net, trace))
}

/// Trains on a normalized dataset with `hidden` tanh units.
pub fn scg_train(ds: &Dataset, hidden: usize, cfg: &TrainConfig) -> Result<MlpNetwork> {
    scg_train_traced(ds, hidden, cfg).map(|(net, _)| net)
}

pub fn scg_train_traced(
    ds: &Dataset,
    hidden: usize,
    cfg: &TrainConfig,
) -> Result<(MlpNetwork, TrainTrace)> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !ds.is_normalized() {
        return Err(Error::NotNormalized);
    }
    train_mlp(&ds.features(), &ds.labels(), hidden, cfg)
}
