//! Numerical statistics engine: mutual-information estimators for feature
//! scoring, one-way ANOVA, the chi-square independence test, logistic
//! regression with odds ratios and likelihood-ratio tests, and the special
//! functions their p-values require.

pub mod anova;
pub mod chi2;
pub mod logit;
pub mod mi;
pub mod special;

use serde::{Deserialize, Serialize};

pub use anova::{anova_oneway, f_upper_tail, AnovaRow};
pub use chi2::{chi2_independence, Chi2Row};
pub use logit::{design_with_intercept, logit_fit, LogitFit, LogitRow};
pub use mi::{mi_discrete, mi_knn, score_feature, MiConfig, MiMode};
pub use special::{digamma, log_gamma, normal_sf, reg_inc_beta, reg_inc_gamma_lower, reg_inc_gamma_upper};

/// Which hypothesis test produced a [`TestResult`], with its degrees of
/// freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestKind {
    AnovaF { dof_between: f64, dof_within: f64 },
    Chi2 { dof: f64 },
}

/// Outcome of a single hypothesis test.
///
/// `degenerate` marks results where the statistic's denominator collapsed
/// (e.g. zero within-group variance with a real between-group difference).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub kind: TestKind,
    pub degenerate: bool,
}
