//! Linear discriminant analysis with a pooled covariance estimate and ridge
//! jitter on singular covariance.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LdaModel {
    weights: DVector<f64>,
    threshold: f64,
    pub n_features: usize,
}

const RIDGE_STEPS: [f64; 5] = [1e-10, 1e-8, 1e-6, 1e-4, 1e-2];

pub fn fit(x: &DMatrix<f64>, y: &[u8]) -> Result<LdaModel> {
    let n = x.nrows();
    let m = x.ncols();
    let idx1: Vec<usize> = (0..n).filter(|&i| y[i] == 1).collect();
    let idx0: Vec<usize> = (0..n).filter(|&i| y[i] == 0).collect();
    let mean_of = |rows: &[usize]| -> DVector<f64> {
        let mut mu = DVector::zeros(m);
        for &i in rows {
            for j in 0..m {
                mu[j] += x[(i, j)];
            }
        }
        mu / rows.len() as f64
    };
    let mu1 = mean_of(&idx1);
    let mu0 = mean_of(&idx0);

    // Pooled within-class scatter / (n - 2).
    let mut cov = DMatrix::zeros(m, m);
    for (rows, mu) in [(&idx1, &mu1), (&idx0, &mu0)] {
        for &i in rows.iter() {
            for a in 0..m {
                let da = x[(i, a)] - mu[a];
                for b in a..m {
                    cov[(a, b)] += da * (x[(i, b)] - mu[b]);
                }
            }
        }
    }
    let dof = (n as f64 - 2.0).max(1.0);
    for a in 0..m {
        for b in a..m {
            cov[(a, b)] /= dof;
            cov[(b, a)] = cov[(a, b)];
        }
    }

    let trace: f64 = (0..m).map(|j| cov[(j, j)]).sum();
    if trace <= 0.0 {
        return Err(Error::SingularCovariance(
            "all features have zero within-class variance; ridge jitter cannot help".into(),
        ));
    }
    let delta = &mu1 - &mu0;
    let base_scale = trace / m as f64;
    let mut weights = None;
    if let Some(chol) = cov.clone().cholesky() {
        weights = Some(chol.solve(&delta));
    } else {
        for lambda in RIDGE_STEPS {
            let mut jittered = cov.clone();
            for j in 0..m {
                jittered[(j, j)] += lambda * base_scale;
            }
            if let Some(chol) = jittered.cholesky() {
                weights = Some(chol.solve(&delta));
                break;
            }
        }
    }
    let weights = weights.ok_or_else(|| {
        Error::SingularCovariance("covariance not factorizable after ridge jitter".into())
    })?;
    let mid = (&mu1 + &mu0) / 2.0;
    let threshold = weights.dot(&mid);
    Ok(LdaModel {
        weights,
        threshold,
        n_features: m,
    })
}

impl LdaModel {
    /// Signed distance along the discriminant direction.
    pub fn score(&self, x: &DMatrix<f64>) -> Vec<f64> {
        (0..x.nrows())
            .map(|i| {
                let mut s = 0.0;
                for j in 0..x.ncols() {
                    s += self.weights[j] * x[(i, j)];
                }
                s - self.threshold
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn blobs(n: usize, sep: f64, rng_seed: u64) -> (DMatrix<f64>, Vec<u8>) {
        let mut rng = seed::rng(rng_seed);
        let mut x = DMatrix::zeros(n, 3);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let c = (i % 2) as u8;
            y.push(c);
            for j in 0..3 {
                let mu = if c == 1 { sep } else { 0.0 };
                // Box-Muller normal draw.
                let u1: f64 = rng.gen::<f64>().max(1e-12);
                let u2: f64 = rng.gen();
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                x[(i, j)] = mu + z;
            }
        }
        (x, y)
    }

    #[test]
    fn separated_blobs_train_perfectly() {
        let (x, y) = blobs(200, 8.0, 2);
        let model = fit(&x, &y).unwrap();
        let auroc = crate::subset_select::auroc(&model.score(&x), &y).unwrap();
        assert_eq!(auroc, 1.0);
    }

    #[test]
    fn zero_variance_everywhere_is_singular() {
        let x = DMatrix::from_element(10, 2, 3.0);
        let y: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        assert!(matches!(fit(&x, &y), Err(Error::SingularCovariance(_))));
    }

    #[test]
    fn duplicate_feature_survives_with_ridge() {
        // Two identical columns make the covariance singular but fixable.
        let (x0, y) = blobs(100, 2.0, 6);
        let mut x = DMatrix::zeros(100, 2);
        for i in 0..100 {
            x[(i, 0)] = x0[(i, 0)];
            x[(i, 1)] = x0[(i, 0)];
        }
        let model = fit(&x, &y).unwrap();
        let auroc = crate::subset_select::auroc(&model.score(&x), &y).unwrap();
        assert!(auroc > 0.8);
    }

    #[test]
    fn affine_map_preserves_auroc() {
        let (x, y) = blobs(150, 1.5, 9);
        let base = fit(&x, &y).unwrap().score(&x);
        // Invertible affine map: x -> x A + b applied to all rows.
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.5, 0.0, 1.5, 0.2, 0.1, -0.2, 0.8]);
        let b = [5.0, -3.0, 0.7];
        let mut xt = &x * &a;
        for i in 0..xt.nrows() {
            for j in 0..3 {
                xt[(i, j)] += b[j];
            }
        }
        let mapped = fit(&xt, &y).unwrap().score(&xt);
        let auroc_base = crate::subset_select::auroc(&base, &y).unwrap();
        let auroc_mapped = crate::subset_select::auroc(&mapped, &y).unwrap();
        assert!((auroc_base - auroc_mapped).abs() < 1e-9);
    }
}
