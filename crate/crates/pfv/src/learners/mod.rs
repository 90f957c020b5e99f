//! Downstream classifiers behind one training/scoring abstraction:
//! extremely randomized trees (the selection engine) plus LDA and MLP as
//! independent validation models. All fits are seed-deterministic.

pub mod extra_trees;
pub mod lda;
pub mod mlp;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use extra_trees::{ExtraTreesModel, ExtraTreesParams, KCandidates};
pub use lda::LdaModel;
pub use mlp::{Activation, MlpModel, MlpParams};

/// Which classifier to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    ExtraTrees(ExtraTreesParams),
    Lda,
    Mlp(MlpParams),
}

impl Default for LearnerSpec {
    fn default() -> Self {
        LearnerSpec::ExtraTrees(ExtraTreesParams::default())
    }
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::ExtraTrees(_) => "extra_trees",
            LearnerSpec::Lda => "lda",
            LearnerSpec::Mlp(_) => "mlp",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LearnerSpec::ExtraTrees(p) => p.validate(),
            LearnerSpec::Lda => Ok(()),
            LearnerSpec::Mlp(p) => p.validate(),
        }
    }
}

/// A trained classifier ready to score rows with the training feature count.
#[derive(Debug, Clone)]
pub enum FittedModel {
    ExtraTrees(ExtraTreesModel),
    Lda(LdaModel),
    Mlp(MlpModel),
}

impl FittedModel {
    pub fn n_features(&self) -> usize {
        match self {
            FittedModel::ExtraTrees(m) => m.n_features,
            FittedModel::Lda(m) => m.n_features,
            FittedModel::Mlp(m) => m.n_features,
        }
    }
}

/// Train the configured classifier on (X, y) with a per-fit seed.
pub fn fit(spec: &LearnerSpec, x: &DMatrix<f64>, y: &[u8], seed: u64) -> Result<FittedModel> {
    spec.validate()?;
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "X has {} rows but y has {}",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() < 2 {
        return Err(Error::DegenerateFit("need at least 2 rows".into()));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(Error::DegenerateFit("y must contain both classes".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("X contains non-finite values".into()));
    }
    Ok(match spec {
        LearnerSpec::ExtraTrees(p) => FittedModel::ExtraTrees(extra_trees::fit(x, y, p, seed)?),
        LearnerSpec::Lda => FittedModel::Lda(lda::fit(x, y)?),
        LearnerSpec::Mlp(p) => FittedModel::Mlp(mlp::fit(x, y, p, seed)?),
    })
}

/// Positive-class score per row.
pub fn score(model: &FittedModel, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    if x.ncols() != model.n_features() {
        return Err(Error::Shape(format!(
            "model expects {} features, got {}",
            model.n_features(),
            x.ncols()
        )));
    }
    Ok(match model {
        FittedModel::ExtraTrees(m) => m.score(x),
        FittedModel::Lda(m) => m.score(x),
        FittedModel::Mlp(m) => m.score(x),
    })
}
