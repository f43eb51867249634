//! Bootstrap ensemble of Gini trees.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::tree::{argmax_lowest, fit_tree_on, DecisionTree};
use crate::learners::TreeConfig;
use crate::rng::{mix, rng_from};
use crate::stream::{Instance, StreamSchema};

pub const DEFAULT_N_TREES: usize = 100;

/// A fitted forest. Immutable once built, safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    schema: StreamSchema,
    trees: Vec<DecisionTree>,
    seed: u64,
}

/// Fits `n_trees` trees, tree `i` on a bootstrap resample (size `|data|`,
/// with replacement) drawn from sub-seed `mix(seed, i)`.
///
/// Trees fit in parallel; the result is independent of scheduling because
/// each tree's randomness comes only from its own sub-seed.
pub fn fit_forest(
    data: &[Instance],
    schema: &StreamSchema,
    n_trees: usize,
    config: &TreeConfig,
    seed: u64,
) -> Result<RandomForest> {
    if n_trees == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    let trees = (0..n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(mix(seed, i as u64));
            let indices = if config.bootstrap {
                bootstrap_indices(data.len(), &mut rng)
            } else {
                (0..data.len()).collect()
            };
            fit_tree_on(data, &indices, schema, config, &mut rng)
        })
        .collect::<Result<Vec<DecisionTree>>>()?;
    Ok(RandomForest {
        schema: schema.clone(),
        trees,
        seed,
    })
}

fn bootstrap_indices(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

impl RandomForest {
    /// Assembles a forest from already-fitted trees, validating that they
    /// agree with the schema. This is also the deserialization gate.
    pub fn from_parts(
        schema: StreamSchema,
        trees: Vec<DecisionTree>,
        seed: u64,
    ) -> Result<Self> {
        let forest = RandomForest {
            schema,
            trees,
            seed,
        };
        forest.validate()?;
        Ok(forest)
    }

    fn validate(&self) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::invalid("a forest needs at least one tree"));
        }
        for tree in &self.trees {
            tree.validate()?;
            if tree.n_features() != self.schema.n_features
                || tree.n_classes() != self.schema.n_classes()
            {
                return Err(Error::invalid("tree shape disagrees with forest schema"));
            }
        }
        Ok(())
    }

    pub fn schema(&self) -> &StreamSchema {
        &self.schema
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Average over trees of each leaf's normalized class counts. The
    /// output is nonnegative and sums to 1 within float error.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.trees[0].check_input(x)?;
        let mut acc = vec![0.0f64; self.schema.n_classes()];
        for tree in &self.trees {
            tree.accumulate_proba(x, &mut acc);
        }
        let n = self.trees.len() as f64;
        for a in acc.iter_mut() {
            *a /= n;
        }
        Ok(acc)
    }

    /// Argmax of [`Self::predict_proba`], ties to the lowest class index.
    ///
    /// Voting with averaged leaf distributions (rather than counting each
    /// tree's hard vote) keeps `predict` consistent with `predict_proba`
    /// by construction.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let proba = self.predict_proba(x)?;
        Ok(argmax_lowest(proba.into_iter()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let forest: RandomForest = serde_json::from_str(text)?;
        forest.validate()?;
        Ok(forest)
    }
}

/// Out-of-bag error of a fitted forest over its own training data.
///
/// The bootstrap membership of every tree is replayed from the stored seed,
/// so `data` and `config` must be exactly what the forest was fitted with.
/// Instances that appear in every bootstrap are skipped.
pub fn oob_error(forest: &RandomForest, data: &[Instance], config: &TreeConfig) -> Result<f64> {
    if !config.bootstrap {
        return Err(Error::invalid("out-of-bag error needs bootstrap resampling"));
    }
    let n = data.len();
    if n == 0 {
        return Err(Error::invalid("out-of-bag error needs training data"));
    }

    let mut acc = vec![vec![0.0f64; forest.schema.n_classes()]; n];
    let mut oob_trees = vec![0u32; n];
    for (i, tree) in forest.trees.iter().enumerate() {
        let mut rng = rng_from(mix(forest.seed, i as u64));
        let mut in_bag = vec![false; n];
        for j in bootstrap_indices(n, &mut rng) {
            in_bag[j] = true;
        }
        for (j, inst) in data.iter().enumerate() {
            if !in_bag[j] {
                tree.accumulate_proba(&inst.features, &mut acc[j]);
                oob_trees[j] += 1;
            }
        }
    }

    let mut scored = 0usize;
    let mut wrong = 0usize;
    for (j, inst) in data.iter().enumerate() {
        if oob_trees[j] == 0 {
            continue;
        }
        scored += 1;
        let predicted = argmax_lowest(acc[j].iter().copied());
        if Some(predicted) != inst.label {
            wrong += 1;
        }
    }
    if scored == 0 {
        return Err(Error::invalid(
            "no instance was out of bag for any tree; cannot score",
        ));
    }
    Ok(wrong as f64 / scored as f64)
}
