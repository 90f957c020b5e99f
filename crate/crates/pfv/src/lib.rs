//! Feature discovery on severely class-imbalanced tabular cohorts.
//!
//! The crate chains three stages behind one config-driven pipeline:
//!
//! 1. **Preprocessing** ([`cohort`], [`strata`]) — load a delimited table,
//!    drop incomplete rows, assign each subject one of four diagnostic
//!    classes via a configurable threshold rule, and enumerate
//!    (class-pair x stratum) binary tasks gated by sample adequacy.
//! 2. **Feature selection** ([`balance_rank`], [`subset_select`]) — rank all
//!    features by averaging mutual-information scores over repeatedly
//!    re-balanced under-samples, stopping when the top-d set stabilizes;
//!    then pick the rank-prefix whose held-out AUROC is maximal.
//! 3. **Validation** ([`learners`], [`infostats`]) — re-score the selected
//!    factors with independent classifiers (extremely randomized trees,
//!    LDA, MLP) and run a statistical battery (ANOVA, chi-square, logistic
//!    regression with odds ratios and likelihood-ratio tests).
//!
//! Every randomized stage derives its seeds from a master seed and stream
//! indices, so results are identical however many threads run. The
//! [`pipeline`] module writes all artifacts as plot-ready CSV plus a JSON
//! run manifest; see the `examples/` directory for one runnable program per
//! capability and `src/bin/pfv.rs` for the thin CLI.

pub mod balance_rank;
pub mod cohort;
pub mod error;
pub mod infostats;
pub mod learners;
pub mod pipeline;
pub mod seed;
pub mod strata;
pub mod subset_select;
pub mod synth;

pub use error::{Error, Result};
