//! Chi-square test of independence on contingency tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infostats::special::reg_inc_gamma_upper;
use crate::infostats::{TestKind, TestResult};

/// Pearson chi-square independence test on an r x c count table.
///
/// Expected counts come from the margins; dof = (r-1)(c-1); the p-value is
/// the chi-square upper tail. Tables with a zero row or column margin, or
/// with fewer than two rows or columns, are rejected as degenerate.
pub fn chi2_independence(table: &[Vec<u64>]) -> Result<TestResult> {
    let r = table.len();
    if r == 0 {
        return Err(Error::DegenerateTable("empty table".into()));
    }
    let c = table[0].len();
    if table.iter().any(|row| row.len() != c) {
        return Err(Error::Shape("ragged contingency table".into()));
    }
    if r < 2 || c < 2 {
        return Err(Error::DegenerateTable(format!(
            "need at least 2x2, got {r}x{c} (dof {})",
            (r.saturating_sub(1)) * (c.saturating_sub(1))
        )));
    }
    let row_sums: Vec<u64> = table.iter().map(|row| row.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..c).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    if row_sums.iter().any(|&s| s == 0) || col_sums.iter().any(|&s| s == 0) {
        return Err(Error::DegenerateTable("zero row or column margin".into()));
    }
    let total: u64 = row_sums.iter().sum();
    let total_f = total as f64;
    let mut stat = 0.0;
    for i in 0..r {
        for j in 0..c {
            let expected = row_sums[i] as f64 * col_sums[j] as f64 / total_f;
            let diff = table[i][j] as f64 - expected;
            stat += diff * diff / expected;
        }
    }
    let dof = ((r - 1) * (c - 1)) as f64;
    let p = reg_inc_gamma_upper(dof / 2.0, stat / 2.0)?;
    Ok(TestResult {
        statistic: stat,
        p_value: p,
        kind: TestKind::Chi2 { dof },
        degenerate: false,
    })
}

/// Serializable chi-square output row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Chi2Row {
    pub variable: String,
    pub scenario: String,
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}
