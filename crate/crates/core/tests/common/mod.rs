//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use dispute_core::{KernelSpec, Label};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mann-Whitney AUC by direct pair counting, ties worth half.
pub fn pair_count_auc(scores: &[f64], labels: &[Label]) -> f64 {
    let mut greater: u128 = 0;
    let mut ties: u128 = 0;
    let (mut nc, mut np) = (0u128, 0u128);
    for (i, li) in labels.iter().enumerate() {
        if li.is_conflict() {
            nc += 1;
        } else {
            np += 1;
            continue;
        }
        for (j, lj) in labels.iter().enumerate() {
            if lj.is_conflict() {
                continue;
            }
            if scores[i] > scores[j] {
                greater += 1;
            } else if scores[i] == scores[j] {
                ties += 1;
            }
        }
    }
    (2 * greater + ties) as f64 / (2 * nc * np) as f64
}

/// Maximum of the soft-margin dual, found by enumerating which coefficients
/// sit at 0, at C, or strictly between, and solving the equality-constrained
/// stationarity system on each face. Needs a positive definite Gram matrix.
pub fn brute_force_dual(x: &[Vec<f64>], y: &[Label], kernel: &KernelSpec, c: f64) -> f64 {
    let n = x.len();
    let ys: Vec<f64> = y.iter().map(|l| l.sign()).collect();
    let q = DMatrix::from_fn(n, n, |i, j| {
        ys[i] * ys[j] * kernel.eval(&x[i], &x[j]).unwrap()
    });
    let objective = |a: &DVector<f64>| a.sum() - 0.5 * (a.transpose() * &q * a)[(0, 0)];
    let feas_tol = 1e-9 * c.max(1.0);

    let mut best = f64::NEG_INFINITY;
    let mut state = vec![0u8; n];
    for code in 0..3usize.pow(n as u32) {
        let mut k = code;
        for s in state.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha = DVector::from_fn(n, |i, _| if state[i] == 1 { c } else { 0.0 });
        let bound_sum: f64 = (0..n).map(|i| alpha[i] * ys[i]).sum();

        if !free.is_empty() {
            let m = free.len();
            let mut a = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = q[(i, j)];
                }
                a[(r, m)] = ys[i];
                a[(m, r)] = ys[i];
                let fixed: f64 = (0..n)
                    .filter(|&j| state[j] == 1)
                    .map(|j| q[(i, j)] * c)
                    .sum();
                rhs[r] = 1.0 - fixed;
            }
            rhs[m] = -bound_sum;
            let Some(sol) = a.clone().lu().solve(&rhs) else {
                continue;
            };
            if (&a * &sol - &rhs).amax() > 1e-8 * (1.0 + rhs.amax()) {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let in_box = alpha.iter().all(|&v| v >= -feas_tol && v <= c + feas_tol);
        let eq: f64 = (0..n).map(|i| alpha[i] * ys[i]).sum();
        if in_box && eq.abs() <= feas_tol {
            best = best.max(objective(&alpha));
        }
    }
    best
}

/// A random SVM instance with both classes present.
pub struct DualInstance {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Label>,
    pub kernel: KernelSpec,
    pub c: f64,
}

/// Linear instances use as many dimensions as points so the Gram matrix is
/// positive definite, which the face enumeration above relies on.
pub fn random_dual_instance(seed: u64) -> DualInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let linear = seed.is_multiple_of(2);
    let dim = if linear { n } else { rng.random_range(1..=3) };
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut y: Vec<Label> = (0..n)
        .map(|_| {
            if rng.random::<bool>() {
                Label::Conflict
            } else {
                Label::Peace
            }
        })
        .collect();
    y[0] = Label::Conflict;
    y[1] = Label::Peace;
    let kernel = if linear {
        KernelSpec::Linear
    } else {
        KernelSpec::Rbf {
            gamma: rng.random_range(0.5..4.0),
        }
    };
    let c = [0.1, 1.0, 1000.0][rng.random_range(0..3)];
    DualInstance { x, y, kernel, c }
}

/// Central finite difference of `f` at `w`, step `h`.
pub fn central_difference(w: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = w.to_vec();
    (0..w.len())
        .map(|i| {
            probe[i] = w[i] + h;
            let up = f(&probe);
            probe[i] = w[i] - h;
            let down = f(&probe);
            probe[i] = w[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Small random network and data for gradient checks.
pub fn random_mlp_instance(seed: u64) -> (dispute_core::MlpNetwork, Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = rng.random_range(1..=4);
    let hidden = rng.random_range(1..=5);
    let n = rng.random_range(2..=12);
    let net = dispute_core::MlpNetwork::random(inputs, hidden, seed).unwrap();
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..inputs).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let t: Vec<f64> = (0..n)
        .map(|_| f64::from(rng.random::<bool>() as u8))
        .collect();
    (net, x, t)
}
