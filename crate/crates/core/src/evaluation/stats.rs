//! Standard errors and the correlated-AUC z statistic.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::Label;
use crate::error::{Error, Result};

/// Two-sided 95% critical value.
pub const Z_CRITICAL_95: f64 = 1.96;

/// Hanley-McNeil (1982) standard error of an AUC estimate.
///
/// ```text
/// SE^2 = [A(1-A) + (n_c - 1)(Q1 - A^2) + (n_p - 1)(Q2 - A^2)] / (n_c n_p)
/// Q1 = A / (2 - A),  Q2 = 2A^2 / (1 + A)
/// ```
pub fn auc_standard_error(a: f64, n_conflict: usize, n_peace: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "AUC must lie in [0, 1], got {a}"
        )));
    }
    if a == 0.0 || a == 1.0 {
        return Err(Error::DegenerateAuc(a));
    }
    if n_conflict == 0 || n_peace == 0 {
        return Err(Error::InvalidParameter(
            "standard error needs at least one record per class".into(),
        ));
    }
    let (nc, np) = (n_conflict as f64, n_peace as f64);
    let q1 = a / (2.0 - a);
    let q2 = 2.0 * a * a / (1.0 + a);
    let var = (a * (1.0 - a) + (nc - 1.0) * (q1 - a * a) + (np - 1.0) * (q2 - a * a)) / (nc * np);
    Ok(var.sqrt())
}

/// `z = (a1 - a2) / sqrt(se1^2 + se2^2 - 2 r se1 se2)`
pub fn auc_z_test(a1: f64, se1: f64, a2: f64, se2: f64, r: f64) -> Result<f64> {
    if !(se1 > 0.0 && se2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "standard errors must be > 0, got {se1} and {se2}"
        )));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "r must lie in [-1, 1], got {r}"
        )));
    }
    let var = se1 * se1 + se2 * se2 - 2.0 * r * se1 * se2;
    if var.is_nan() || var <= 0.0 {
        return Err(Error::NonPositiveVariance(var));
    }
    Ok((a1 - a2) / var.sqrt())
}

/// Two AUCs measured on the same cases and their z statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucComparison {
    pub a1: f64,
    pub a2: f64,
    pub se1: f64,
    pub se2: f64,
    pub r: f64,
    pub z: f64,
}

impl AucComparison {
    pub fn new(a1: f64, se1: f64, a2: f64, se2: f64, r: f64) -> Result<Self> {
        let z = auc_z_test(a1, se1, a2, se2, r)?;
        Ok(AucComparison {
            a1,
            a2,
            se1,
            se2,
            r,
            z,
        })
    }

    /// Difference significant at the 95% level.
    pub fn significant(&self) -> bool {
        self.z.abs() > Z_CRITICAL_95
    }

    pub fn report(&self, name1: &str, name2: &str) -> String {
        format!(
            "AUC {name1}: {:.4} (SE {:.5})\nAUC {name2}: {:.4} (SE {:.5})\n\
             correlation r: {:.4}\nz: {:.3}\n95% verdict: {}\n",
            self.a1,
            self.se1,
            self.a2,
            self.se2,
            self.r,
            self.z,
            if self.significant() {
                "significant difference"
            } else {
                "no significant difference"
            }
        )
    }
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && v[order[end + 1]] == v[order[k]] {
            end += 1;
        }
        let avg = (k + end) as f64 / 2.0 + 1.0;
        for &idx in &order[k..=end] {
            ranks[idx] = avg;
        }
        k = end + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Integral of the bivariate normal density at `(t, t)` over correlation
/// `0..rho`, i.e. `Phi2(t, t; rho) - Phi(t)^2`.
fn bivariate_excess(t: f64, rho: f64) -> f64 {
    const STEPS: usize = 400;
    let f =
        |s: f64| (-t * t / (1.0 + s)).exp() / (2.0 * std::f64::consts::PI * (1.0 - s * s).sqrt());
    let h = rho / STEPS as f64;
    let mut acc = f(0.0) + f(rho);
    for k in 1..STEPS {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Correlation between two AUC estimates implied by a within-class score
/// correlation, under an equal-variance binormal model.
///
/// With placements `Phi(X)` for a conflict score `X ~ N(delta, 1)` and scores
/// from the two classifiers correlated by `rho` within each class,
/// `Cov = Phi2(t, t; rho/2) - A^2` where `t = Phi^-1(A)`. Normalizing by the
/// `rho = 1` value gives the correlation of the two estimates, which is the
/// quantity tabulated by Hanley and McNeil (1983).
pub fn binormal_auc_correlation(score_correlation: f64, mean_auc: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&score_correlation) {
        return Err(Error::InvalidParameter(format!(
            "score correlation must lie in [-1, 1], got {score_correlation}"
        )));
    }
    if !(mean_auc > 0.0 && mean_auc < 1.0) {
        return Err(Error::DegenerateAuc(mean_auc));
    }
    let t = Normal::standard().inverse_cdf(mean_auc);
    Ok(bivariate_excess(t, score_correlation / 2.0) / bivariate_excess(t, 0.5))
}

/// Estimates the r of the z test from paired scores of two classifiers on the
/// same cases: average the within-class Spearman correlations, then map
/// through [`binormal_auc_correlation`] at the mean AUC.
pub fn estimate_auc_correlation(
    scores1: &[f64],
    scores2: &[f64],
    actual: &[Label],
    auc1: f64,
    auc2: f64,
) -> Result<f64> {
    if scores1.len() != actual.len() || scores2.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: scores1.len().min(scores2.len()),
            right: actual.len(),
        });
    }
    let split = |class: Label| -> (Vec<f64>, Vec<f64>) {
        actual
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| (scores1[i], scores2[i]))
            .unzip()
    };
    let (c1, c2) = split(Label::Conflict);
    let (p1, p2) = split(Label::Peace);
    if c1.len() < 2 || p1.len() < 2 {
        return Err(Error::SingleClass);
    }
    let avg = 0.5 * (spearman(&c1, &c2) + spearman(&p1, &p2));
    binormal_auc_correlation(avg, 0.5 * (auc1 + auc2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn se_single_pair_collapses() {
        assert!((auc_standard_error(0.5, 1, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn se_degenerate_and_invalid() {
        assert!(matches!(
            auc_standard_error(1.0, 5, 5),
            Err(Error::DegenerateAuc(_))
        ));
        assert!(matches!(
            auc_standard_error(0.0, 5, 5),
            Err(Error::DegenerateAuc(_))
        ));
        assert!(auc_standard_error(0.7, 0, 5).is_err());
        assert!(auc_standard_error(1.2, 5, 5).is_err());
    }

    #[test]
    fn se_shrinks_with_sample_size() {
        for &a in &[0.55, 0.7, 0.84, 0.95] {
            let mut prev = f64::INFINITY;
            for n in [2usize, 5, 10, 50, 100, 1000, 10000] {
                let se = auc_standard_error(a, n, n).unwrap();
                assert!(se < prev, "a={a} n={n}");
                prev = se;
                // Growing either class alone also shrinks it.
                assert!(auc_standard_error(a, n + 1, n).unwrap() < se);
                assert!(auc_standard_error(a, n, n + 1).unwrap() < se);
            }
        }
    }

    #[test]
    fn z_examples() {
        assert_eq!(auc_z_test(0.8, 0.01, 0.8, 0.02, 0.3).unwrap(), 0.0);
        let z = auc_z_test(0.83, 0.01, 0.80, 0.01, 0.0).unwrap();
        assert!((z - 0.03 / 0.0002f64.sqrt()).abs() < 1e-9);
        assert!((z - 2.1213).abs() < 1e-3);
    }

    #[test]
    fn z_rejects_inconsistent_r() {
        // se1 == se2 and r == 1 leaves zero variance.
        assert!(matches!(
            auc_z_test(0.8, 0.01, 0.7, 0.01, 1.0),
            Err(Error::NonPositiveVariance(_))
        ));
        assert!(auc_z_test(0.8, 0.0, 0.7, 0.01, 0.0).is_err());
    }

    #[test]
    fn z_is_antisymmetric() {
        let z = auc_z_test(0.84, 0.01022, 0.81, 0.00998, 0.3937).unwrap();
        let back = auc_z_test(0.81, 0.00998, 0.84, 0.01022, 0.3937).unwrap();
        assert_eq!(z, -back);
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn binormal_mapping_endpoints() {
        assert!((binormal_auc_correlation(1.0, 0.8).unwrap() - 1.0).abs() < 1e-12);
        assert!(binormal_auc_correlation(0.0, 0.8).unwrap().abs() < 1e-15);
        // As AUC -> 0.5 the mapping tends to asin(rho/2) / asin(1/2).
        let r = binormal_auc_correlation(0.6, 0.5).unwrap();
        let expected = (0.3f64).asin() / (0.5f64).asin();
        assert!((r - expected).abs() < 1e-9, "{r} vs {expected}");
        // The estimate correlation never exceeds the score correlation.
        for &a in &[0.6, 0.75, 0.9, 0.97] {
            for &rho in &[0.1, 0.4, 0.8] {
                let r = binormal_auc_correlation(rho, a).unwrap();
                assert!(r > 0.0 && r <= rho, "a={a} rho={rho} r={r}");
            }
        }
    }

    #[test]
    fn comparison_report_contains_verdict() {
        let cmp = AucComparison::new(0.84, 0.01022, 0.81, 0.00998, 0.3937).unwrap();
        assert!(cmp.significant());
        assert!(cmp.report("SVM", "NN").contains("significant difference"));
    }
}
