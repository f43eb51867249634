//! From-scratch decision trees and random forests.
//!
//! These serve as both the deployed teacher and the mimicking student, so
//! they must be deterministic functions of (data order, config, seed): every
//! random choice flows from a sub-seed derived with [`crate::rng::mix`], and
//! all tie-breaks (equal-gain splits, equal-vote classes) resolve to the
//! lowest index. The defaults mirror common forest defaults: Gini impurity,
//! midpoint thresholds, ceil(sqrt(q)) features per split, unlimited depth,
//! bootstrap resampling, 100 trees.

mod forest;
mod tree;

pub use forest::{fit_forest, oob_error, RandomForest, DEFAULT_N_TREES};
pub use tree::{fit_tree, DecisionTree};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many features a split may consider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum FeatureSubset {
    /// ceil(sqrt(n_features)) random features per split.
    #[default]
    Sqrt,
    /// Every feature at every split (no sampling randomness).
    All,
    /// A fixed number of random features per split.
    Fixed(usize),
}

impl FeatureSubset {
    fn size(self, n_features: usize) -> usize {
        match self {
            FeatureSubset::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            FeatureSubset::All => n_features,
            FeatureSubset::Fixed(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// `None` grows until purity or `min_split` stops a branch.
    pub max_depth: Option<usize>,
    /// Smallest node size still eligible for splitting.
    pub min_split: usize,
    pub n_candidate_features: FeatureSubset,
    /// Whether forest trees train on bootstrap resamples of the data.
    pub bootstrap: bool,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_split: 2,
            n_candidate_features: FeatureSubset::Sqrt,
            bootstrap: true,
        }
    }
}

impl TreeConfig {
    fn validate(&self, n_features: usize) -> Result<()> {
        if self.min_split < 2 {
            return Err(Error::invalid("min_split must be at least 2"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::invalid("max_depth must be positive"));
        }
        let k = self.n_candidate_features.size(n_features);
        if k == 0 || k > n_features {
            return Err(Error::invalid(format!(
                "candidate feature count {k} outside 1..={n_features}"
            )));
        }
        Ok(())
    }
}
