//! Binary logistic regression fitted by iteratively reweighted least squares,
//! with Wald tests, 95% confidence intervals, and the likelihood-ratio test
//! against the intercept-only model.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infostats::special::{normal_sf, reg_inc_gamma_upper};

/// Two-sided 95% normal quantile.
const Z_975: f64 = 1.959_964;
/// Coefficients past this magnitude are treated as diverging (separation).
const SEPARATION_LIMIT: f64 = 30.0;
const GRAD_TOL: f64 = 1e-8;
const LL_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 100;

/// Fitted logistic model. All per-covariate vectors are indexed like the
/// columns of the design matrix, intercept first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogitFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub odds_ratios: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub wald_p: Vec<f64>,
    pub llr_stat: f64,
    pub llr_p: f64,
    pub log_likelihood: f64,
    pub converged: bool,
    pub n_iter: usize,
}

/// Maximum-likelihood logistic fit.
///
/// `x` must already carry the intercept as its first column; `y` holds 0/1
/// responses. Diverging coefficients raise a separation error and a singular
/// information matrix raises a collinearity error.
pub fn logit_fit(x: &DMatrix<f64>, y: &[u8]) -> Result<LogitFit> {
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(Error::Shape(format!(
            "design has {n} rows but y has {}",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::InvalidParams(format!(
            "need n > covariate count, got n={n}, p={p}"
        )));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::DegenerateFit("y must contain both classes".into()));
    }

    let yv: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let mut beta = DVector::zeros(p);
    let mut ll = log_likelihood(x, &yv, &beta);
    let mut converged = false;
    let mut n_iter = 0;

    for iter in 1..=MAX_ITERS {
        n_iter = iter;
        let eta = x * &beta;
        let mu: DVector<f64> = eta.map(sigmoid);
        // Score vector g = X^T (y - mu).
        let resid = DVector::from_iterator(n, yv.iter().zip(mu.iter()).map(|(a, b)| a - b));
        let grad = x.transpose() * &resid;
        if grad.amax() < GRAD_TOL {
            converged = true;
            break;
        }
        // Observed information X^T W X with W = diag(mu (1 - mu)).
        let mut info = DMatrix::zeros(p, p);
        for i in 0..n {
            let w = mu[i] * (1.0 - mu[i]);
            let row = x.row(i);
            for a in 0..p {
                for b in a..p {
                    info[(a, b)] += w * row[a] * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[(a, b)] = info[(b, a)];
            }
        }
        let chol = info
            .clone()
            .cholesky()
            .ok_or(Error::Collinearity)?;
        let step = chol.solve(&grad);
        beta += step;
        if beta.amax() > SEPARATION_LIMIT {
            return Err(Error::Separation {
                limit: SEPARATION_LIMIT,
            });
        }
        let new_ll = log_likelihood(x, &yv, &beta);
        if (new_ll - ll).abs() < LL_TOL {
            ll = new_ll;
            converged = true;
            break;
        }
        ll = new_ll;
    }
    if !converged {
        return Err(Error::NonConvergence {
            max_iters: MAX_ITERS,
        });
    }

    // Standard errors from the inverse observed information at the optimum.
    let eta = x * &beta;
    let mu: DVector<f64> = eta.map(sigmoid);
    let mut info = DMatrix::zeros(p, p);
    for i in 0..n {
        let w = mu[i] * (1.0 - mu[i]);
        let row = x.row(i);
        for a in 0..p {
            for b in a..p {
                info[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            info[(a, b)] = info[(b, a)];
        }
    }
    let cov = info.try_inverse().ok_or(Error::Collinearity)?;
    let se: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let odds_ratios: Vec<f64> = coefficients.iter().map(|c| c.exp()).collect();
    let ci_low: Vec<f64> = coefficients
        .iter()
        .zip(&se)
        .map(|(c, s)| c - Z_975 * s)
        .collect();
    let ci_high: Vec<f64> = coefficients
        .iter()
        .zip(&se)
        .map(|(c, s)| c + Z_975 * s)
        .collect();
    let wald_p: Vec<f64> = coefficients
        .iter()
        .zip(&se)
        .map(|(c, s)| {
            if *s > 0.0 {
                2.0 * normal_sf((c / s).abs())
            } else {
                f64::NAN
            }
        })
        .collect();

    // Likelihood ratio against the intercept-only model, whose MLE is the
    // empirical positive rate.
    let pos_rate = n_pos as f64 / n as f64;
    let ll_null =
        n_pos as f64 * pos_rate.ln() + (n - n_pos) as f64 * (1.0 - pos_rate).ln();
    let llr_stat = (2.0 * (ll - ll_null)).max(0.0);
    let llr_dof = (p - 1) as f64;
    let llr_p = if llr_dof > 0.0 {
        reg_inc_gamma_upper(llr_dof / 2.0, llr_stat / 2.0)?
    } else {
        1.0
    };

    Ok(LogitFit {
        coefficients,
        standard_errors: se,
        odds_ratios,
        ci_low,
        ci_high,
        wald_p,
        llr_stat,
        llr_p,
        log_likelihood: ll,
        converged,
        n_iter,
    })
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn log_likelihood(x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    let mut ll = 0.0;
    for i in 0..y.len() {
        let t = eta[i];
        // log sigma(t) = -ln(1 + e^{-t}), computed stably on both sides.
        let log_p = if t >= 0.0 {
            -(-t).exp().ln_1p()
        } else {
            t - t.exp().ln_1p()
        };
        let log_q = log_p - t; // log(1 - sigma(t)) = log sigma(t) - t
        ll += y[i] * log_p + (1.0 - y[i]) * log_q;
    }
    ll
}

/// Build a design matrix with an intercept column prepended.
pub fn design_with_intercept(covariates: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if covariates.is_empty() {
        return Err(Error::InvalidParams("no covariates".into()));
    }
    let n = covariates[0].len();
    if covariates.iter().any(|c| c.len() != n) {
        return Err(Error::Shape("covariate length mismatch".into()));
    }
    let p = covariates.len() + 1;
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        x[(i, 0)] = 1.0;
        for (j, col) in covariates.iter().enumerate() {
            x[(i, j + 1)] = col[i];
        }
    }
    Ok(x)
}

/// Serializable logistic output row for one covariate in one scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogitRow {
    pub scenario: String,
    pub covariate: String,
    pub odds_ratio: f64,
    pub p_value: f64,
    pub coefficient: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}
