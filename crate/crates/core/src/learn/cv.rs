//! Stratified k-fold cross-validation, feature-group ablation, and a
//! label-permutation helper for null-distribution checks.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::features::{feature_groups, feature_index, Dataset};
use crate::learn::{compute_metrics, predict, train, Algorithm, ClassMetrics, ModelMeta, TrainConfig};
use crate::model::CorpusLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub test_size: usize,
    pub metrics: ClassMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub folds: usize,
    pub per_fold: Vec<FoldReport>,
    /// Metrics over every held-out prediction pooled together, so each
    /// row contributes exactly once.
    pub pooled: ClassMetrics,
}

/// Stratified cross-validation: both classes are spread across folds by
/// shuffling each class's rows and dealing them out round-robin, so a
/// fold never goes single-class. The shuffle and every fold's training
/// run derive from `config.seed` alone.
pub fn cross_validate(ds: &Dataset, config: &TrainConfig, folds: usize) -> Result<CvReport> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    let troll_count = ds.count_label(CorpusLabel::Troll);
    let benign_count = ds.count_label(CorpusLabel::Benign);
    let smallest = troll_count.min(benign_count);
    if smallest < folds {
        return Err(Error::InvalidArgument(format!(
            "smallest class has {smallest} rows, fewer than {folds} folds; \
             use at most {smallest} folds"
        )));
    }

    // One rng drives both class shuffles so the split is a pure
    // function of the seed.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut troll_idx: Vec<usize> =
        (0..ds.len()).filter(|&i| ds.rows[i].label == CorpusLabel::Troll).collect();
    let mut benign_idx: Vec<usize> =
        (0..ds.len()).filter(|&i| ds.rows[i].label != CorpusLabel::Troll).collect();
    troll_idx.shuffle(&mut rng);
    benign_idx.shuffle(&mut rng);

    let mut fold_of = vec![0usize; ds.len()];
    for (pos, &row) in troll_idx.iter().chain(benign_idx.iter()).enumerate() {
        fold_of[row] = pos % folds;
    }

    let fold_results = exec::par_map((0..folds).collect(), |fold| -> Result<(FoldReport, Vec<(CorpusLabel, CorpusLabel)>)> {
        let train_rows: Vec<_> = ds
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| fold_of[*i] != fold)
            .map(|(_, r)| r.clone())
            .collect();
        let test_rows: Vec<_> = ds
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| fold_of[*i] == fold)
            .map(|(_, r)| r.clone())
            .collect();
        let train_ds = Dataset { feature_names: ds.feature_names.clone(), rows: train_rows };
        let model = train(&train_ds, config, ModelMeta::default())?;
        let mut pairs = Vec::with_capacity(test_rows.len());
        for row in &test_rows {
            let (predicted, _) = predict(&model, &row.values)?;
            pairs.push((row.label, predicted));
        }
        let report =
            FoldReport { fold, test_size: pairs.len(), metrics: compute_metrics(&pairs) };
        Ok((report, pairs))
    });

    let mut per_fold = Vec::with_capacity(folds);
    let mut pooled_pairs = Vec::with_capacity(ds.len());
    for r in fold_results {
        let (report, pairs) = r?;
        per_fold.push(report);
        pooled_pairs.extend(pairs);
    }
    Ok(CvReport {
        algorithm: config.algorithm,
        seed: config.seed,
        folds,
        per_fold,
        pooled: compute_metrics(&pooled_pairs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub component: String,
    pub feature_count: usize,
    pub metrics: ClassMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub folds: usize,
    pub rows: Vec<AblationRow>,
}

/// Cross-validates each feature group alone, then all features
/// together. Groups are resolved by column name, so a dataset holding a
/// subset of the canonical features still ablates correctly; a group
/// with no columns present is skipped.
pub fn ablate_components(
    ds: &Dataset,
    config: &TrainConfig,
    folds: usize,
) -> Result<AblationReport> {
    let mut rows = Vec::new();
    for (group, range) in feature_groups() {
        let indices: Vec<usize> = ds
            .feature_names
            .iter()
            .enumerate()
            .filter(|(_, name)| feature_index(name).is_some_and(|i| range.contains(&i)))
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            continue;
        }
        let sub = ds.subset_columns(&indices)?;
        let report = cross_validate(&sub, config, folds)?;
        rows.push(AblationRow {
            component: group.to_string(),
            feature_count: indices.len(),
            metrics: report.pooled,
        });
    }
    let full = cross_validate(ds, config, folds)?;
    rows.push(AblationRow {
        component: "all".to_string(),
        feature_count: ds.feature_names.len(),
        metrics: full.pooled,
    });
    Ok(AblationReport { algorithm: config.algorithm, seed: config.seed, folds, rows })
}

/// Returns a copy of the dataset with the labels shuffled across rows.
/// The label multiset is preserved; any real association between
/// features and labels is destroyed, which makes the result a null
/// baseline for classifier sanity checks.
pub fn permute_labels(ds: &Dataset, seed: u64) -> Dataset {
    let mut labels: Vec<CorpusLabel> = ds.rows.iter().map(|r| r.label).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    labels.shuffle(&mut rng);
    let mut out = ds.clone();
    for (row, label) in out.rows.iter_mut().zip(labels) {
        row.label = label;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FEATURE_NAMES;
    use crate::learn::testutil::separable;
    use crate::features::DatasetRow;

    #[test]
    fn cross_validate_separable_data_scores_high() {
        let ds = separable(30, 4, 7);
        let config = TrainConfig::new(Algorithm::DecisionTree, 7);
        let report = cross_validate(&ds, &config, 5).unwrap();
        assert_eq!(report.per_fold.len(), 5);
        assert!(report.pooled.f1 > 0.9, "pooled f1 {}", report.pooled.f1);
        // Every row is held out exactly once.
        let held: usize = report.per_fold.iter().map(|f| f.test_size).sum();
        assert_eq!(held, ds.len());
        assert_eq!(report.pooled.total(), ds.len());
    }

    #[test]
    fn cross_validate_is_deterministic() {
        let ds = separable(20, 3, 11);
        let config = TrainConfig::new(Algorithm::RandomForest, 11);
        let a = cross_validate(&ds, &config, 4).unwrap();
        let b = cross_validate(&ds, &config, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn folds_are_stratified() {
        let ds = separable(12, 2, 3);
        let config = TrainConfig::new(Algorithm::Knn, 3);
        let report = cross_validate(&ds, &config, 4).unwrap();
        // 12 per class dealt round-robin into 4 folds: every fold holds
        // 3 of each class, so recall is defined in every fold.
        for fold in &report.per_fold {
            assert_eq!(fold.test_size, 6);
            assert!(fold.metrics.recall_defined);
        }
    }

    #[test]
    fn too_many_folds_is_an_error() {
        let ds = separable(3, 2, 1);
        let config = TrainConfig::new(Algorithm::Knn, 1);
        let err = cross_validate(&ds, &config, 4).unwrap_err();
        assert!(err.to_string().contains("folds"), "unexpected error: {err}");
    }

    #[test]
    fn permute_labels_preserves_counts_and_is_seeded() {
        let ds = separable(25, 3, 9);
        let p1 = permute_labels(&ds, 5);
        let p2 = permute_labels(&ds, 5);
        assert_eq!(p1, p2);
        assert_eq!(p1.count_label(CorpusLabel::Troll), ds.count_label(CorpusLabel::Troll));
        assert_eq!(p1.count_label(CorpusLabel::Benign), ds.count_label(CorpusLabel::Benign));
        // Features and identities are untouched.
        for (a, b) in ds.rows.iter().zip(&p1.rows) {
            assert_eq!(a.account_id, b.account_id);
            assert_eq!(a.values, b.values);
        }
        // With 50 rows the identity permutation is vanishingly unlikely.
        assert!(ds.rows.iter().zip(&p1.rows).any(|(a, b)| a.label != b.label));
    }

    /// Builds a canonical-named dataset where only the named column
    /// separates the classes.
    fn canonical_separable(informative: &str, n_per_class: usize) -> Dataset {
        let col = feature_index(informative).unwrap();
        let mut rows = Vec::new();
        for i in 0..n_per_class * 2 {
            let troll = i % 2 == 0;
            let mut values = vec![0.0; FEATURE_NAMES.len()];
            // Deterministic filler that carries no class signal.
            for (j, v) in values.iter_mut().enumerate() {
                *v = ((i * 31 + j * 17) % 97) as f64 / 97.0;
            }
            values[col] = if troll { 0.9 } else { 0.1 };
            rows.push(DatasetRow {
                account_id: format!("a{i:04}"),
                label: if troll { CorpusLabel::Troll } else { CorpusLabel::Benign },
                provenance: String::new(),
                values,
            });
        }
        Dataset { feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), rows }
    }

    #[test]
    fn ablation_isolates_the_informative_group() {
        let ds = canonical_separable("fraction_fake_sources", 20);
        let config = TrainConfig::new(Algorithm::DecisionTree, 13);
        let report = ablate_components(&ds, &config, 4).unwrap();
        let names: Vec<&str> = report.rows.iter().map(|r| r.component.as_str()).collect();
        assert_eq!(names, ["metadata", "temporal", "stylometry", "source", "all"]);
        let get = |n: &str| report.rows.iter().find(|r| r.component == n).unwrap();
        assert_eq!(get("metadata").feature_count, 10);
        assert_eq!(get("temporal").feature_count, 24);
        assert_eq!(get("stylometry").feature_count, 8);
        assert_eq!(get("source").feature_count, 3);
        assert_eq!(get("all").feature_count, 45);
        assert!(get("source").metrics.f1 > 0.95);
        assert!(get("all").metrics.f1 > 0.95);
        assert!(get("source").metrics.f1 > get("metadata").metrics.f1);
    }

    #[test]
    fn ablation_skips_groups_with_no_columns() {
        let ds = canonical_separable("retweet_fraction", 12);
        // Keep only the metadata columns.
        let keep: Vec<usize> = (0..10).collect();
        let sub = ds.subset_columns(&keep).unwrap();
        let config = TrainConfig::new(Algorithm::DecisionTree, 2);
        let report = ablate_components(&sub, &config, 3).unwrap();
        let names: Vec<&str> = report.rows.iter().map(|r| r.component.as_str()).collect();
        assert_eq!(names, ["metadata", "all"]);
    }
}
