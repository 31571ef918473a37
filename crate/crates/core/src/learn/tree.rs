//! CART-style binary decision tree with Gini impurity. Growth continues
//! until nodes are pure or unsplittable (or an optional depth cap is
//! hit). All tie-breaks are pinned so training is order-deterministic:
//! a strictly smaller impurity wins; at equal impurity the lowest
//! feature index wins, then the lowest threshold.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        /// Troll fraction of the training samples in this leaf.
        score: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        /// Samples with value <= threshold go left.
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
    pub n_features: usize,
}

impl TreeModel {
    /// Troll score of one feature vector: the training-class fraction
    /// of the leaf it lands in.
    pub fn score(&self, values: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { score, .. } => return *score,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if values[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        fn walk(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => 1 + walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }
}

/// Feature sampling policy for one growth run.
pub(super) enum FeaturePolicy<'r> {
    /// Consider every feature at every split.
    All,
    /// Sample `m` distinct candidate features per split.
    Sampled { m: usize, rng: &'r mut ChaCha8Rng },
}

pub(super) struct GrowOutcome {
    pub root: TreeNode,
    /// Per-feature impurity decrease, weighted by node sample share of
    /// this tree's root. Not normalized.
    pub importances: Vec<f64>,
}

struct Grower<'a> {
    xs: &'a [&'a [f64]],
    ys: &'a [bool],
    n_features: usize,
    min_samples_leaf: usize,
    max_depth: Option<usize>,
    root_n: f64,
    importances: Vec<f64>,
}

fn gini(trolls: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let pt = trolls / total;
    let pb = 1.0 - pt;
    1.0 - pt * pt - pb * pb
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    weighted_gini: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl<'a> Grower<'a> {
    fn leaf(&self, indices: &[usize]) -> TreeNode {
        let trolls = indices.iter().filter(|&&i| self.ys[i]).count();
        TreeNode::Leaf { score: trolls as f64 / indices.len() as f64, samples: indices.len() }
    }

    fn best_split_for_feature(&self, indices: &[usize], feature: usize) -> Option<(f64, f64)> {
        let mut pairs: Vec<(f64, bool)> =
            indices.iter().map(|&i| (self.xs[i][feature], self.ys[i])).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pairs.len();
        let total_trolls = pairs.iter().filter(|p| p.1).count() as f64;
        let mut best: Option<(f64, f64)> = None;
        let mut left_trolls = 0.0f64;
        for s in 1..n {
            left_trolls += pairs[s - 1].1 as u8 as f64;
            if pairs[s].0 == pairs[s - 1].0 {
                continue;
            }
            if s < self.min_samples_leaf || n - s < self.min_samples_leaf {
                continue;
            }
            let (nl, nr) = (s as f64, (n - s) as f64);
            let weighted = (nl * gini(left_trolls, nl) + nr * gini(total_trolls - left_trolls, nr))
                / n as f64;
            // Midpoint threshold; rounding toward the upper value would
            // send it to the wrong side, so fall back to the lower one.
            let (lo, hi) = (pairs[s - 1].0, pairs[s].0);
            let mut threshold = lo + (hi - lo) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            if threshold < lo {
                threshold = lo;
            }
            // Thresholds ascend within a feature, so strict improvement
            // keeps the lowest threshold on ties.
            if best.is_none_or(|(g, _)| weighted < g) {
                best = Some((weighted, threshold));
            }
        }
        best
    }

    fn grow(&mut self, indices: Vec<usize>, depth: usize, policy: &mut FeaturePolicy<'_>) -> TreeNode {
        let n = indices.len();
        let trolls = indices.iter().filter(|&&i| self.ys[i]).count();
        let pure = trolls == 0 || trolls == n;
        let depth_capped = self.max_depth.is_some_and(|d| depth >= d);
        if n < 2 || n < 2 * self.min_samples_leaf || pure || depth_capped {
            return self.leaf(&indices);
        }

        let candidates: Vec<usize> = match policy {
            FeaturePolicy::All => (0..self.n_features).collect(),
            FeaturePolicy::Sampled { m, rng } => {
                if *m >= self.n_features {
                    (0..self.n_features).collect()
                } else {
                    let mut picked = rand::seq::index::sample(*rng, self.n_features, *m).into_vec();
                    // Ascending order keeps the lowest-index tie-break
                    // meaningful under sampling.
                    picked.sort_unstable();
                    picked
                }
            }
        };

        let mut best: Option<BestSplit> = None;
        for feature in candidates {
            if let Some((weighted, threshold)) = self.best_split_for_feature(&indices, feature) {
                let better = match &best {
                    None => true,
                    Some(b) => weighted < b.weighted_gini,
                };
                if better {
                    let (left, right): (Vec<usize>, Vec<usize>) =
                        indices.iter().partition(|&&i| self.xs[i][feature] <= threshold);
                    best = Some(BestSplit { feature, threshold, weighted_gini: weighted, left, right });
                }
            }
        }

        let Some(split) = best else {
            return self.leaf(&indices);
        };

        let parent_gini = gini(trolls as f64, n as f64);
        let nl = split.left.len() as f64;
        let nr = split.right.len() as f64;
        let decrease = parent_gini - split.weighted_gini;
        debug_assert!(nl > 0.0 && nr > 0.0);
        self.importances[split.feature] += (n as f64 / self.root_n) * decrease;

        let left = self.grow(split.left, depth + 1, policy);
        let right = self.grow(split.right, depth + 1, policy);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// Grow one tree over the given sample indices (a bootstrap multiset
/// for forests, everything for a plain tree).
pub(super) fn grow_tree(
    xs: &[&[f64]],
    ys: &[bool],
    indices: Vec<usize>,
    min_samples_leaf: usize,
    max_depth: Option<usize>,
    mut policy: FeaturePolicy<'_>,
) -> GrowOutcome {
    let n_features = xs[0].len();
    let mut grower = Grower {
        xs,
        ys,
        n_features,
        min_samples_leaf: min_samples_leaf.max(1),
        max_depth,
        root_n: indices.len() as f64,
        importances: vec![0.0; n_features],
    };
    let root = grower.grow(indices, 0, &mut policy);
    GrowOutcome { root, importances: grower.importances }
}

/// Train a decision tree on the full dataset with every feature
/// considered at every split.
pub(super) fn train(xs: &[&[f64]], ys: &[bool], config: &TrainConfig) -> TreeModel {
    let outcome = grow_tree(
        xs,
        ys,
        (0..xs.len()).collect(),
        config.min_samples_leaf,
        config.max_depth,
        FeaturePolicy::All,
    );
    TreeModel { root: outcome.root, n_features: xs[0].len() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TrainConfig {
        TrainConfig::new(super::super::Algorithm::DecisionTree, 0)
    }

    fn rows(data: &[(f64, f64, bool)]) -> (Vec<Vec<f64>>, Vec<bool>) {
        let xs: Vec<Vec<f64>> = data.iter().map(|(a, b, _)| vec![*a, *b]).collect();
        let ys: Vec<bool> = data.iter().map(|(_, _, y)| *y).collect();
        (xs, ys)
    }

    #[test]
    fn fits_training_data_exactly_when_separable() {
        let (xs, ys) = rows(&[
            (0.1, 5.0, false),
            (0.2, 9.0, false),
            (0.8, 5.0, true),
            (0.9, 9.0, true),
        ]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &cfg());
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(model.score(x) >= 0.5, *y);
        }
        // One split suffices: root + two leaves.
        assert_eq!(model.node_count(), 3);
    }

    #[test]
    fn pure_node_is_a_leaf() {
        let (xs, ys) = rows(&[(0.1, 1.0, true), (0.9, 2.0, true)]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &cfg());
        assert_eq!(model.root, TreeNode::Leaf { score: 1.0, samples: 2 });
    }

    #[test]
    fn constant_features_mixed_labels_make_a_leaf() {
        let (xs, ys) = rows(&[(1.0, 2.0, true), (1.0, 2.0, false)]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &cfg());
        assert_eq!(model.root, TreeNode::Leaf { score: 0.5, samples: 2 });
    }

    #[test]
    fn tie_breaks_prefer_lowest_feature_index() {
        // Both features separate the data identically; feature 0 wins.
        let (xs, ys) = rows(&[(0.0, 0.0, false), (1.0, 1.0, true)]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &cfg());
        match model.root {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, 0.5);
            }
            TreeNode::Leaf { .. } => panic!("expected a split"),
        }
    }

    #[test]
    fn threshold_midpoint_guard_handles_adjacent_floats() {
        let lo = 1.0f64;
        let hi = lo + f64::EPSILON;
        let xs = [vec![lo], vec![hi]];
        let ys = vec![false, true];
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &cfg());
        match model.root {
            TreeNode::Split { threshold, .. } => {
                assert!(lo <= threshold && threshold < hi);
                assert!(model.score(&[lo]) < 0.5);
                assert!(model.score(&[hi]) >= 0.5);
            }
            TreeNode::Leaf { .. } => panic!("expected a split"),
        }
    }

    #[test]
    fn max_depth_caps_growth() {
        let mut config = cfg();
        config.max_depth = Some(1);
        // XOR-ish data needs depth 2; capped tree stays at one split.
        let (xs, ys) = rows(&[
            (0.0, 0.0, false),
            (0.0, 1.0, true),
            (1.0, 0.0, true),
            (1.0, 1.0, false),
        ]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &config);
        fn depth(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        assert!(depth(&model.root) <= 1);
    }

    #[test]
    fn deep_growth_memorizes_xor() {
        let (xs, ys) = rows(&[
            (0.0, 0.0, false),
            (0.0, 1.0, true),
            (1.0, 0.0, true),
            (1.0, 1.0, false),
        ]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let model = train(&refs, &ys, &cfg());
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(model.score(x) >= 0.5, *y, "at {x:?}");
        }
    }

    #[test]
    fn importances_concentrate_on_the_splitting_feature() {
        let (xs, ys) = rows(&[
            (0.1, 7.0, false),
            (0.2, 7.0, false),
            (0.8, 7.0, true),
            (0.9, 7.0, true),
        ]);
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let outcome = grow_tree(&refs, &ys, vec![0, 1, 2, 3], 1, None, FeaturePolicy::All);
        assert!(outcome.importances[0] > 0.0);
        assert_eq!(outcome.importances[1], 0.0);
    }
}
