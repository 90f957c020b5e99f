//! One-way analysis of variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infostats::special::reg_inc_beta;
use crate::infostats::{TestKind, TestResult};

/// One-way ANOVA over two or more groups of real values.
///
/// F = (between-group SS / (g-1)) / (within-group SS / (n-g)); the p-value is
/// the upper tail of the F(g-1, n-g) distribution. Zero within-group variance
/// with nonzero between-group variance is reported as p = 0 with the
/// degenerate flag set; fully identical data gives F = 0, p = 1.
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<TestResult> {
    let g = groups.len();
    if g < 2 {
        return Err(Error::InvalidParams("ANOVA needs at least 2 groups".into()));
    }
    if groups.iter().any(|gr| gr.is_empty()) {
        return Err(Error::InvalidParams("ANOVA groups must be non-empty".into()));
    }
    let n: usize = groups.iter().map(|gr| gr.len()).sum();
    if n <= g {
        return Err(Error::InvalidParams(format!(
            "ANOVA needs total n > number of groups, got n={n}, g={g}"
        )));
    }
    let grand_mean: f64 = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for gr in groups {
        let mean: f64 = gr.iter().sum::<f64>() / gr.len() as f64;
        ss_between += gr.len() as f64 * (mean - grand_mean).powi(2);
        ss_within += gr.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    }
    let dof_between = (g - 1) as f64;
    let dof_within = (n - g) as f64;
    let kind = TestKind::AnovaF {
        dof_between,
        dof_within,
    };
    if ss_within == 0.0 {
        return if ss_between == 0.0 {
            Ok(TestResult {
                statistic: 0.0,
                p_value: 1.0,
                kind,
                degenerate: false,
            })
        } else {
            Ok(TestResult {
                statistic: f64::INFINITY,
                p_value: 0.0,
                kind,
                degenerate: true,
            })
        };
    }
    let f = (ss_between / dof_between) / (ss_within / dof_within);
    let p = f_upper_tail(f, dof_between, dof_within)?;
    Ok(TestResult {
        statistic: f,
        p_value: p,
        kind,
        degenerate: false,
    })
}

/// Upper tail of the F(d1, d2) distribution at `f`.
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> Result<f64> {
    if f <= 0.0 {
        return Ok(1.0);
    }
    // P(F > f) = I_{d2/(d2 + d1 f)}(d2/2, d1/2)
    let x = d2 / (d2 + d1 * f);
    reg_inc_beta(d2 / 2.0, d1 / 2.0, x)
}

/// Convenience alias for serializing ANOVA output rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnovaRow {
    pub variable: String,
    pub scenario: String,
    pub statistic: f64,
    pub dof_between: f64,
    pub dof_within: f64,
    pub p_value: f64,
    pub degenerate: bool,
}
