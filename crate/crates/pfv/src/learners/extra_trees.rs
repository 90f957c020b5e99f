//! Extremely randomized trees for binary classification.
//!
//! Each split draws k candidate features among those non-constant in the
//! node, draws one uniformly random cut point per candidate between the
//! feature's observed min and max, and keeps the candidate with the best
//! Gini reduction. Trees are grown unpruned and vote with their leaf
//! positive fractions.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Candidate-feature count per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KCandidates {
    /// max(1, floor(sqrt(m)))
    Sqrt,
    Count(usize),
}

impl Default for KCandidates {
    fn default() -> Self {
        KCandidates::Sqrt
    }
}

impl KCandidates {
    pub fn resolve(self, m: usize) -> usize {
        match self {
            KCandidates::Sqrt => ((m as f64).sqrt().floor() as usize).max(1),
            KCandidates::Count(k) => k.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtraTreesParams {
    pub n_trees: usize,
    /// Minimum node size eligible for splitting.
    pub min_split: usize,
    pub k_candidates: KCandidates,
}

impl Default for ExtraTreesParams {
    fn default() -> Self {
        ExtraTreesParams {
            n_trees: 100,
            min_split: 2,
            k_candidates: KCandidates::Sqrt,
        }
    }
}

impl ExtraTreesParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::InvalidParams("n_trees must be >= 1".into()));
        }
        if self.min_split < 2 {
            return Err(Error::InvalidParams("min_split must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: usize,
        cut: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        pos_fraction: f64,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn score_row(&self, row: &[f64]) -> f64 {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                Node::Leaf { pos_fraction } => return *pos_fraction,
                Node::Split {
                    feature,
                    cut,
                    left,
                    right,
                } => {
                    node = if row[*feature] < *cut { *left } else { *right };
                }
            }
        }
    }
}

/// Fitted forest.
#[derive(Debug, Clone)]
pub struct ExtraTreesModel {
    trees: Vec<Tree>,
    pub n_features: usize,
}

fn gini(n_pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = n_pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct TreeBuilder<'a> {
    x: &'a DMatrix<f64>,
    y: &'a [u8],
    k: usize,
    min_split: usize,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, rows: Vec<usize>, rng: &mut impl Rng) -> usize {
        let n = rows.len();
        let n_pos = rows.iter().filter(|&&i| self.y[i] == 1).count();
        let make_leaf = |nodes: &mut Vec<Node>| {
            nodes.push(Node::Leaf {
                pos_fraction: n_pos as f64 / n as f64,
            });
            nodes.len() - 1
        };
        if n < self.min_split || n_pos == 0 || n_pos == n {
            return make_leaf(&mut self.nodes);
        }
        // Features with spread in this node.
        let mut usable: Vec<(usize, f64, f64)> = Vec::new();
        for j in 0..self.x.ncols() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &i in &rows {
                let v = self.x[(i, j)];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi > lo {
                usable.push((j, lo, hi));
            }
        }
        if usable.is_empty() {
            return make_leaf(&mut self.nodes);
        }
        let k = self.k.min(usable.len());
        let picks = sample(rng, usable.len(), k);
        let parent_impurity = gini(n_pos, n);
        let mut best: Option<(f64, usize, f64)> = None; // (reduction, feature, cut)
        for idx in picks.iter() {
            let (feature, lo, hi) = usable[idx];
            let cut = rng.gen_range(lo..hi);
            let mut nl = 0;
            let mut nl_pos = 0;
            for &i in &rows {
                if self.x[(i, feature)] < cut {
                    nl += 1;
                    if self.y[i] == 1 {
                        nl_pos += 1;
                    }
                }
            }
            let nr = n - nl;
            if nl == 0 || nr == 0 {
                continue;
            }
            let nr_pos = n_pos - nl_pos;
            let child = (nl as f64 * gini(nl_pos, nl) + nr as f64 * gini(nr_pos, nr)) / n as f64;
            let reduction = parent_impurity - child;
            if best.map_or(true, |(b, _, _)| reduction > b) {
                best = Some((reduction, feature, cut));
            }
        }
        let Some((_, feature, cut)) = best else {
            return make_leaf(&mut self.nodes);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&i| self.x[(i, feature)] < cut);
        // Reserve the split slot before recursing so child indices are known.
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { pos_fraction: 0.0 });
        let left = self.build(left_rows, rng);
        let right = self.build(right_rows, rng);
        self.nodes[slot] = Node::Split {
            feature,
            cut,
            left,
            right,
        };
        slot
    }
}

pub fn fit(x: &DMatrix<f64>, y: &[u8], params: &ExtraTreesParams, fit_seed: u64) -> Result<ExtraTreesModel> {
    params.validate()?;
    let m = x.ncols();
    let k = params.k_candidates.resolve(m);
    let trees: Vec<Tree> = (0..params.n_trees)
        .map(|t| {
            let mut rng = seed::rng(seed::derive2(fit_seed, 0xE7, t as u64));
            let mut builder = TreeBuilder {
                x,
                y,
                k,
                min_split: params.min_split,
                nodes: Vec::new(),
            };
            let root = builder.build((0..x.nrows()).collect(), &mut rng);
            debug_assert_eq!(root, 0);
            Tree {
                nodes: builder.nodes,
            }
        })
        .collect();
    Ok(ExtraTreesModel {
        trees,
        n_features: m,
    })
}

impl ExtraTreesModel {
    /// Mean of per-tree leaf positive fractions; always in [0, 1].
    pub fn score(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.nrows());
        let mut row_buf = vec![0.0; x.ncols()];
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                row_buf[j] = x[(i, j)];
            }
            let sum: f64 = self.trees.iter().map(|t| t.score_row(&row_buf)).sum();
            out.push(sum / self.trees.len() as f64);
        }
        out
    }
}
