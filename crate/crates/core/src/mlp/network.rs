use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::rng::{rng_for, Stream};

/// Lower/upper clamp applied to predictions inside the cross-entropy.
pub const PROB_EPS: f64 = 1e-12;

/// Two layers of adaptive weights: `tanh` hidden units and a single logistic
/// output giving P(conflict).
///
/// `w1` is stored row-major, `hidden x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNetwork {
    pub inputs: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

#[inline]
pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl MlpNetwork {
    pub fn zeros(inputs: usize, hidden: usize) -> Result<Self> {
        if inputs == 0 || hidden == 0 {
            return Err(Error::InvalidParameter(format!(
                "network needs d >= 1 and M >= 1 (got d={inputs}, M={hidden})"
            )));
        }
        Ok(MlpNetwork {
            inputs,
            hidden,
            w1: vec![0.0; hidden * inputs],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        })
    }

    /// Uniform initialisation in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn random(inputs: usize, hidden: usize, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(inputs, hidden)?;
        let mut rng = rng_for(seed, Stream::MlpInit);
        let r1 = 1.0 / (inputs as f64).sqrt();
        let r2 = 1.0 / (hidden as f64).sqrt();
        for w in net.w1.iter_mut().chain(net.b1.iter_mut()) {
            *w = rng.random_range(-r1..=r1);
        }
        for w in net.w2.iter_mut() {
            *w = rng.random_range(-r2..=r2);
        }
        net.b2 = rng.random_range(-r2..=r2);
        Ok(net)
    }

    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + 2 * self.hidden + 1
    }

    /// Flattened parameters: `w1`, `b1`, `w2`, `b2`.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.n_params());
        let (w1, rest) = p.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, rest) = rest.split_at(self.hidden);
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = rest[0];
    }

    pub fn is_finite(&self) -> bool {
        self.params().iter().all(|w| w.is_finite())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.inputs {
            return Err(Error::DimensionMismatch {
                expected: self.inputs,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Output pre-activation, filling `h` with the hidden activations.
    fn output_logit(&self, x: &[f64], h: &mut [f64]) -> f64 {
        let mut z = self.b2;
        for (j, hj) in h.iter_mut().enumerate().take(self.hidden) {
            let row = &self.w1[j * self.inputs..(j + 1) * self.inputs];
            let a = self.b1[j] + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
            *hj = a.tanh();
            z += self.w2[j] * *hj;
        }
        z
    }

    /// Probability of conflict for one input vector.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut h = vec![0.0; self.hidden];
        Ok(logistic(self.output_logit(x, &mut h)))
    }

    /// Conflict iff `forward(x) >= threshold`.
    pub fn predict(&self, x: &[f64], threshold: f64) -> Result<Label> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must lie in (0, 1), got {threshold}"
            )));
        }
        Ok(if self.forward(x)? >= threshold {
            Label::Conflict
        } else {
            Label::Peace
        })
    }

    /// Mean binary cross-entropy over the batch and its exact gradient, laid
    /// out like [`MlpNetwork::params`].
    pub fn loss_grad(&self, x: &[Vec<f64>], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if x.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: targets.len(),
            });
        }
        let (d, m) = (self.inputs, self.hidden);
        let n = x.len() as f64;
        let mut grad = vec![0.0; self.n_params()];
        let (g_w1, rest) = grad.split_at_mut(m * d);
        let (g_b1, rest) = rest.split_at_mut(m);
        let (g_w2, g_b2) = rest.split_at_mut(m);
        let mut h = vec![0.0; m];
        let mut loss = 0.0;

        for (xi, &t) in x.iter().zip(targets) {
            self.check_dim(xi)?;
            let p = logistic(self.output_logit(xi, &mut h));
            let pc = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
            loss -= t * pc.ln() + (1.0 - t) * (1.0 - pc).ln();

            // Where the clamp is active the loss is flat in z.
            let dz = if p == pc { (p - t) / n } else { 0.0 };
            if dz == 0.0 {
                continue;
            }
            g_b2[0] += dz;
            for j in 0..m {
                g_w2[j] += dz * h[j];
                let da = dz * self.w2[j] * (1.0 - h[j] * h[j]);
                g_b1[j] += da;
                for (g, xv) in g_w1[j * d..(j + 1) * d].iter_mut().zip(xi) {
                    *g += da * xv;
                }
            }
        }
        Ok((loss / n, grad))
    }

    /// Loss only; cheaper than [`MlpNetwork::loss_grad`].
    pub fn loss(&self, x: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut h = vec![0.0; self.hidden];
        let mut loss = 0.0;
        for (xi, &t) in x.iter().zip(targets) {
            self.check_dim(xi)?;
            let p = logistic(self.output_logit(xi, &mut h)).clamp(PROB_EPS, 1.0 - PROB_EPS);
            loss -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
        }
        Ok(loss / x.len() as f64)
    }
}

pub fn mlp_forward(net: &MlpNetwork, x: &[f64]) -> Result<f64> {
    net.forward(x)
}

pub fn mlp_loss_grad(net: &MlpNetwork, x: &[Vec<f64>], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    net.loss_grad(x, targets)
}

pub fn mlp_predict(net: &MlpNetwork, x: &[f64], threshold: f64) -> Result<Label> {
    net.predict(x, threshold)
}
