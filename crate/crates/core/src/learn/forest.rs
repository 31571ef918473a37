//! Random forest: bagged Gini trees with per-split feature sampling.
//! Each tree's randomness comes from its own stream seeded by
//! (seed + tree index), so trees can be grown on any number of worker
//! threads, in any order, and the forest comes out identical.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{FeaturePolicy, TreeModel};
use super::TrainConfig;
use crate::error::{Error, Result};
use crate::exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub n_features: usize,
    /// Mean per-tree Gini impurity decrease per feature, normalized to
    /// sum to 1 (all zeros only if no tree ever split).
    pub importances: Vec<f64>,
}

impl ForestModel {
    /// Troll score: the fraction of trees voting troll (each tree votes
    /// troll when its leaf score reaches 0.5).
    pub fn score(&self, values: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.score(values) >= 0.5).count();
        votes as f64 / self.trees.len() as f64
    }
}

/// The bootstrap sample (indices into the training set, with
/// replacement) drawn by tree `tree_index` of a forest trained with
/// `seed` on `n` rows. Public so resampling can be reproduced exactly
/// in audits.
pub fn bootstrap_indices(seed: u64, tree_index: u64, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(tree_index));
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub(super) fn train(xs: &[&[f64]], ys: &[bool], config: &TrainConfig) -> Result<ForestModel> {
    if config.forest_trees == 0 {
        return Err(Error::InvalidArgument("forest needs at least one tree".into()));
    }
    let n_features = xs[0].len();
    let m = if config.forest_features == 0 {
        ((n_features as f64).sqrt().floor() as usize).max(1)
    } else {
        config.forest_features
    };
    let n = xs.len();

    let grown = exec::par_map((0..config.forest_trees as u64).collect(), |tree_index| {
        // The bootstrap draw and the per-split feature sampling share
        // one stream, in that order.
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(tree_index));
        let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        super::tree::grow_tree(
            xs,
            ys,
            indices,
            config.min_samples_leaf,
            config.max_depth,
            FeaturePolicy::Sampled { m, rng: &mut rng },
        )
    });

    let mut importances = vec![0.0f64; n_features];
    let mut trees = Vec::with_capacity(grown.len());
    for outcome in grown {
        for (acc, x) in importances.iter_mut().zip(&outcome.importances) {
            *acc += x;
        }
        trees.push(TreeModel { root: outcome.root, n_features });
    }
    for x in &mut importances {
        *x /= trees.len() as f64;
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        for x in &mut importances {
            *x /= total;
        }
    }
    Ok(ForestModel { trees, n_features, importances })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::separable;
    use super::super::{train as train_model, Algorithm, ModelMeta, ModelPayload, TrainConfig};
    use super::*;

    #[test]
    fn bootstrap_is_reproducible_and_in_range() {
        let a = bootstrap_indices(42, 3, 50);
        let b = bootstrap_indices(42, 3, 50);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|&i| i < 50));
        assert_ne!(bootstrap_indices(42, 4, 50), a);
        assert_ne!(bootstrap_indices(43, 3, 50), a);
    }

    #[test]
    fn single_tree_full_sampling_equals_plain_tree_on_its_bootstrap() {
        let ds = separable(25, 4, 8);
        let mut config = TrainConfig::new(Algorithm::RandomForest, 17);
        config.forest_trees = 1;
        config.forest_features = ds.feature_names.len();
        let forest = train_model(&ds, &config, ModelMeta::default()).unwrap();
        let ModelPayload::RandomForest(f) = &forest.payload else { panic!("wrong payload") };

        // Rebuild the bootstrap sample tree 0 drew and train a plain
        // tree on exactly those rows.
        let indices = bootstrap_indices(17, 0, ds.len());
        let mut boot = ds.clone();
        boot.rows = indices
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let mut r = ds.rows[i].clone();
                r.account_id = format!("boot{pos:04}");
                r
            })
            .collect();
        let tree = train_model(&boot, &TrainConfig::new(Algorithm::DecisionTree, 0), ModelMeta::default())
            .unwrap();
        let ModelPayload::DecisionTree(t) = &tree.payload else { panic!("wrong payload") };

        assert_eq!(&f.trees[0], t);
    }

    #[test]
    fn importances_sum_to_one_and_skip_constant_features() {
        let mut ds = separable(40, 5, 9);
        for row in &mut ds.rows {
            row.values[3] = 2.5;
        }
        let model = train_model(&ds, &TrainConfig::new(Algorithm::RandomForest, 4), ModelMeta::default())
            .unwrap();
        let imp = model.importances.as_ref().unwrap();
        let sum: f64 = imp.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "sum {sum}");
        assert_eq!(imp[3], 0.0);
        // Column 0 is the separating feature.
        let max = imp.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(imp[0], max);
        assert!(imp[0] > 0.5);
    }

    #[test]
    fn forest_score_is_vote_fraction() {
        let ds = separable(30, 4, 2);
        let model = train_model(&ds, &TrainConfig::new(Algorithm::RandomForest, 7), ModelMeta::default())
            .unwrap();
        let ModelPayload::RandomForest(f) = &model.payload else { panic!() };
        let score = f.score(&ds.rows[0].values);
        let scaled = score * f.trees.len() as f64;
        assert!((scaled - scaled.round()).abs() < 1e-9, "score {score} not a vote fraction");
    }
}
