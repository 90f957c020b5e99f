//! Mutual-information estimators used to score features against a binary
//! outcome: a plug-in estimator over empirical joints for discrete data and a
//! k-nearest-neighbor estimator for continuous features against a discrete
//! class, in the Kraskov/Ross family.
//!
//! All estimates are in nats.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infostats::special::digamma;

/// Estimator policy for scoring a feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiMode {
    /// Plug-in estimate over the empirical joint, treating every distinct
    /// value as its own category.
    DiscretePlugin,
    /// k-NN estimator for continuous features; features with few distinct
    /// values still fall back to the plug-in estimate.
    Knn,
}

/// Settings for feature scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiConfig {
    pub mode: MiMode,
    /// Neighbor count for the k-NN estimator.
    pub k_neighbors: usize,
    /// Maximum number of distinct values for a feature to be treated as
    /// discrete under `Knn` mode.
    pub discrete_threshold: usize,
}

impl Default for MiConfig {
    fn default() -> Self {
        MiConfig {
            mode: MiMode::Knn,
            k_neighbors: 3,
            discrete_threshold: 16,
        }
    }
}

impl MiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors < 1 {
            return Err(Error::InvalidParams("k_neighbors must be >= 1".into()));
        }
        Ok(())
    }
}

/// Plug-in mutual information between two integer-coded vectors, in nats.
///
/// Computes sum over joint cells of p(a,b) * ln(p(a,b) / (p(a) p(b))).
/// Constant vectors give 0; the estimate is clamped at 0 against rounding.
pub fn mi_discrete(x: &[i64], y: &[i64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "mi_discrete length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::InvalidParams("mi_discrete on empty input".into()));
    }
    let n = x.len() as f64;
    let mut joint: HashMap<(i64, i64), u64> = HashMap::new();
    let mut mx: HashMap<i64, u64> = HashMap::new();
    let mut my: HashMap<i64, u64> = HashMap::new();
    for (&a, &b) in x.iter().zip(y) {
        *joint.entry((a, b)).or_insert(0) += 1;
        *mx.entry(a).or_insert(0) += 1;
        *my.entry(b).or_insert(0) += 1;
    }
    let mut mi = 0.0;
    for (&(a, b), &nab) in &joint {
        let pab = nab as f64 / n;
        let pa = mx[&a] as f64 / n;
        let pb = my[&b] as f64 / n;
        mi += pab * (pab / (pa * pb)).ln();
    }
    Ok(mi.max(0.0))
}

/// k-NN mutual information between a continuous vector and a discrete class
/// vector, in nats, clipped at 0.
///
/// For each point the radius is the distance to its k-th nearest neighbor
/// within its own class; the digamma terms average the neighbor counts within
/// that radius over the full sample. Exact value ties collapse the radius and
/// drive the estimate toward zero.
pub fn mi_knn(x: &[f64], y: &[i64], k: usize) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "mi_knn length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if k < 1 {
        return Err(Error::Estimator("k must be >= 1".into()));
    }
    if n <= k + 1 {
        return Err(Error::Estimator(format!(
            "need n > k + 1, got n={n}, k={k}"
        )));
    }
    let mut class_counts: HashMap<i64, usize> = HashMap::new();
    for &c in y {
        *class_counts.entry(c).or_insert(0) += 1;
    }
    if class_counts.len() < 2 {
        return Err(Error::Estimator("y must contain at least two classes".into()));
    }
    for (&c, &cnt) in &class_counts {
        if cnt <= k {
            return Err(Error::Estimator(format!(
                "class {c} has {cnt} samples; the k-NN estimator needs at least k + 1 = {}",
                k + 1
            )));
        }
    }

    // Sorted copy of all values for radius counting via binary search.
    let mut all: Vec<f64> = x.to_vec();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Per-class sorted values.
    let mut per_class: HashMap<i64, Vec<f64>> = HashMap::new();
    for (&v, &c) in x.iter().zip(y) {
        per_class.entry(c).or_default().push(v);
    }
    for vals in per_class.values_mut() {
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }

    let mut sum_psi_class = 0.0;
    let mut sum_psi_count = 0.0;
    for (&v, &c) in x.iter().zip(y) {
        let class_vals = &per_class[&c];
        let r = kth_neighbor_distance(class_vals, v, k);
        // Count strictly-inside neighbors in the full sample; shrinking the
        // radius by one ulp turns the closed interval query into an open one
        // while keeping exact ties at distance 0 countable.
        let radius = next_down(r);
        let lo = partition_point(&all, |u| u < v - radius);
        let hi = partition_point(&all, |u| u <= v + radius);
        let m = hi - lo; // includes the point itself
        sum_psi_class += digamma(class_counts[&c] as f64)?;
        sum_psi_count += digamma(m.max(1) as f64)?;
    }
    let nf = n as f64;
    let mi = digamma(nf)? - sum_psi_class / nf + digamma(k as f64)? - sum_psi_count / nf;
    Ok(mi.max(0.0))
}

/// Distance from `v` to its k-th nearest neighbor in `sorted` excluding one
/// occurrence of `v` itself (the query point).
fn kth_neighbor_distance(sorted: &[f64], v: f64, k: usize) -> f64 {
    // Index of the query point's slot; any position within the tie run works
    // because only distances matter.
    let pos = partition_point(sorted, |u| u < v);
    debug_assert!(pos < sorted.len() && sorted[pos] == v);
    let mut left = pos; // next candidate on the left is left-1
    let mut right = pos + 1; // skip the query occurrence
    let mut dist = 0.0;
    for _ in 0..k {
        let dl = if left > 0 {
            (v - sorted[left - 1]).abs()
        } else {
            f64::INFINITY
        };
        let dr = if right < sorted.len() {
            (sorted[right] - v).abs()
        } else {
            f64::INFINITY
        };
        if dl <= dr {
            dist = dl;
            left -= 1;
        } else {
            dist = dr;
            right += 1;
        }
    }
    dist
}

fn partition_point(sorted: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    let mut lo = 0;
    let mut hi = sorted.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(sorted[mid]) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest float strictly below `x` for positive `x`; 0 stays 0.
fn next_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    f64::from_bits(x.to_bits() - 1)
}

/// Score one feature column against a binary label per the configured policy.
pub fn score_feature(values: &[f64], y: &[i64], config: &MiConfig) -> Result<f64> {
    match config.mode {
        MiMode::DiscretePlugin => mi_discrete(&code_distinct(values), y),
        MiMode::Knn => {
            let codes = code_distinct(values);
            let distinct = codes.iter().max().map_or(0, |&m| m as usize + 1);
            if distinct <= config.discrete_threshold {
                mi_discrete(&codes, y)
            } else {
                mi_knn(values, y, config.k_neighbors)
            }
        }
    }
}

/// Map each distinct value (by order) to an integer code.
fn code_distinct(values: &[f64]) -> Vec<i64> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    values
        .iter()
        .map(|v| {
            distinct
                .binary_search_by(|d| d.partial_cmp(v).unwrap())
                .unwrap() as i64
        })
        .collect()
}
