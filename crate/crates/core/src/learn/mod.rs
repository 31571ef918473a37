//! The four classifiers and their shared training/prediction surface.
//! All of them consume a labeled [`Dataset`] and produce a
//! [`TrainedModel`] that can be persisted, reloaded, and applied to new
//! feature vectors. Scores are troll-probabilities in [0, 1]; the label
//! is troll exactly when the score reaches 0.5.

mod forest;
mod knn;
mod metrics;
mod scaler;
mod svm;
mod tree;
pub mod cv;

pub use forest::{bootstrap_indices, ForestModel};
pub use knn::KnnModel;
pub use metrics::{compute_metrics, ClassMetrics};
pub use scaler::MinMaxScaler;
pub use svm::SvmModel;
pub use tree::{TreeModel, TreeNode};

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Dataset, LanguageTable};
use crate::model::CorpusLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Knn,
    DecisionTree,
    LinearSvm,
    RandomForest,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Algorithm::Knn => "knn",
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::LinearSvm => "linear_svm",
            Algorithm::RandomForest => "random_forest",
        };
        f.write_str(s)
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knn" => Ok(Algorithm::Knn),
            "dt" | "decision_tree" | "tree" => Ok(Algorithm::DecisionTree),
            "svm" | "linear_svm" => Ok(Algorithm::LinearSvm),
            "rf" | "random_forest" | "forest" => Ok(Algorithm::RandomForest),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{other}' (expected knn, dt, svm, or rf)"
            ))),
        }
    }
}

/// Training configuration. Defaults reproduce the standard setup:
/// k=5 neighbors, hinge-loss SVM with C=1 over 200 epochs, 100-tree
/// forest splitting on sqrt(n_features) candidates, unlimited tree
/// depth with single-sample leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub knn_k: usize,
    pub svm_c: f64,
    pub svm_epochs: usize,
    pub forest_trees: usize,
    /// Candidate features per forest split; 0 means floor(sqrt(d)).
    pub forest_features: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        TrainConfig {
            algorithm,
            seed,
            knn_k: 5,
            svm_c: 1.0,
            svm_epochs: 200,
            forest_trees: 100,
            forest_features: 0,
            max_depth: None,
            min_samples_leaf: 1,
        }
    }

    fn hyperparams(&self) -> BTreeMap<String, String> {
        let mut h = BTreeMap::new();
        match self.algorithm {
            Algorithm::Knn => {
                h.insert("k".into(), self.knn_k.to_string());
            }
            Algorithm::LinearSvm => {
                h.insert("c".into(), self.svm_c.to_string());
                h.insert("epochs".into(), self.svm_epochs.to_string());
            }
            Algorithm::DecisionTree | Algorithm::RandomForest => {
                h.insert(
                    "max_depth".into(),
                    self.max_depth.map_or("none".to_string(), |d| d.to_string()),
                );
                h.insert("min_samples_leaf".into(), self.min_samples_leaf.to_string());
                if self.algorithm == Algorithm::RandomForest {
                    h.insert("trees".into(), self.forest_trees.to_string());
                    h.insert("features_per_split".into(), self.forest_features.to_string());
                }
            }
        }
        h
    }
}

/// Provenance carried inside a persisted model so prediction-time
/// preprocessing can be matched to training-time preprocessing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelMeta {
    pub language_codes: Vec<String>,
    pub catalog_sha256: String,
}

impl ModelMeta {
    pub fn new(languages: &LanguageTable, catalog_sha256: String) -> Self {
        ModelMeta { language_codes: languages.codes().to_vec(), catalog_sha256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelPayload {
    Knn(KnnModel),
    DecisionTree(TreeModel),
    LinearSvm(SvmModel),
    RandomForest(ForestModel),
}

/// A trained classifier plus everything needed to apply it faithfully:
/// feature names, preprocessing provenance, the training identities
/// (for holdout-disjointness checks), and forest importances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub hyperparams: BTreeMap<String, String>,
    pub feature_names: Vec<String>,
    pub meta: ModelMeta,
    pub training_account_ids: Vec<String>,
    pub importances: Option<Vec<f64>>,
    pub payload: ModelPayload,
}

fn validate_training_set(ds: &Dataset) -> Result<(Vec<&[f64]>, Vec<bool>)> {
    if ds.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }
    if ds.feature_names.is_empty() {
        return Err(Error::InvalidArgument("dataset has no feature columns".into()));
    }
    let mut xs = Vec::with_capacity(ds.len());
    let mut ys = Vec::with_capacity(ds.len());
    for row in &ds.rows {
        match row.label {
            CorpusLabel::Troll => ys.push(true),
            CorpusLabel::Benign => ys.push(false),
            CorpusLabel::Unlabeled => {
                return Err(Error::InvalidArgument(format!(
                    "row '{}' is unlabeled; training needs troll/benign labels",
                    row.account_id
                )))
            }
        }
        if row.values.len() != ds.feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "row '{}' has {} values, expected {}",
                row.account_id,
                row.values.len(),
                ds.feature_names.len()
            )));
        }
        if row.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "row '{}' contains a non-finite value",
                row.account_id
            )));
        }
        xs.push(row.values.as_slice());
    }
    if !ys.contains(&true) || !ys.contains(&false) {
        return Err(Error::InvalidArgument(
            "training needs both classes present in the dataset".into(),
        ));
    }
    Ok((xs, ys))
}

/// Train a classifier on a labeled dataset. Deterministic in
/// (dataset, config): the same inputs always produce the same model,
/// no matter how many worker threads run the forest.
pub fn train(ds: &Dataset, config: &TrainConfig, meta: ModelMeta) -> Result<TrainedModel> {
    let (xs, ys) = validate_training_set(ds)?;
    let payload = match config.algorithm {
        Algorithm::Knn => ModelPayload::Knn(knn::train(&xs, &ys, config)?),
        Algorithm::DecisionTree => ModelPayload::DecisionTree(tree::train(&xs, &ys, config)),
        Algorithm::LinearSvm => ModelPayload::LinearSvm(svm::train(&xs, &ys, config)?),
        Algorithm::RandomForest => ModelPayload::RandomForest(forest::train(&xs, &ys, config)?),
    };
    let importances = match &payload {
        ModelPayload::RandomForest(f) => Some(f.importances.clone()),
        _ => None,
    };
    let mut training_account_ids: Vec<String> =
        ds.rows.iter().map(|r| r.account_id.clone()).collect();
    training_account_ids.sort();
    training_account_ids.dedup();
    Ok(TrainedModel {
        algorithm: config.algorithm,
        seed: config.seed,
        hyperparams: config.hyperparams(),
        feature_names: ds.feature_names.clone(),
        meta,
        training_account_ids,
        importances,
        payload,
    })
}

/// Score one feature vector: troll-probability in [0, 1] and the label
/// it implies (troll at 0.5 and above).
pub fn predict(model: &TrainedModel, values: &[f64]) -> Result<(CorpusLabel, f64)> {
    if values.len() != model.feature_names.len() {
        return Err(Error::FeatureMismatch {
            model: model.feature_names.len(),
            input: values.len(),
        });
    }
    let score = match &model.payload {
        ModelPayload::Knn(m) => m.score(values),
        ModelPayload::DecisionTree(m) => m.score(values),
        ModelPayload::LinearSvm(m) => m.score(values),
        ModelPayload::RandomForest(m) => m.score(values),
    };
    let label = if score >= 0.5 { CorpusLabel::Troll } else { CorpusLabel::Benign };
    Ok((label, score))
}

/// Score every row of a dataset. The dataset's feature names must
/// match the model's exactly (same names, same order).
pub fn predict_dataset(
    model: &TrainedModel,
    ds: &Dataset,
) -> Result<Vec<(String, CorpusLabel, f64)>> {
    if ds.feature_names != model.feature_names {
        return Err(Error::Protocol(format!(
            "dataset features do not match the model's ({} vs {} columns or differing names)",
            ds.feature_names.len(),
            model.feature_names.len()
        )));
    }
    ds.rows
        .iter()
        .map(|r| predict(model, &r.values).map(|(l, s)| (r.account_id.clone(), l, s)))
        .collect()
}

/// Per-feature Gini importances of a forest model, summing to 1.
/// Other algorithms have none and return an error.
pub fn gini_importance(model: &TrainedModel) -> Result<Vec<f64>> {
    model.importances.clone().ok_or_else(|| {
        Error::Protocol(format!(
            "importances require a random_forest model, got {}",
            model.algorithm
        ))
    })
}

const MODEL_MAGIC: &str = "trollsweep-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    magic: String,
    version: u32,
    model: TrainedModel,
}

/// Persist a model as versioned JSON.
pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let file = ModelFile {
        magic: MODEL_MAGIC.to_string(),
        version: MODEL_VERSION,
        model: model.clone(),
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::ModelFormat { path: path.to_path_buf(), detail: e.to_string() })?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

/// Load a model persisted by [`save_model`], refusing wrong magic or
/// version rather than misinterpreting bytes.
pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&raw)
        .map_err(|e| Error::ModelFormat { path: path.to_path_buf(), detail: e.to_string() })?;
    if file.magic != MODEL_MAGIC {
        return Err(Error::ModelFormat {
            path: path.to_path_buf(),
            detail: format!("bad magic '{}'", file.magic),
        });
    }
    if file.version != MODEL_VERSION {
        return Err(Error::ModelFormat {
            path: path.to_path_buf(),
            detail: format!("unsupported version {}", file.version),
        });
    }
    Ok(file.model)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::features::DatasetRow;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two-class dataset where column 0 separates the classes cleanly
    /// and the remaining columns are shared noise.
    pub fn separable(n_per_class: usize, n_features: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for i in 0..n_per_class * 2 {
            let troll = i % 2 == 0;
            let mut values: Vec<f64> = (0..n_features).map(|_| rng.gen::<f64>()).collect();
            values[0] = if troll { 0.75 + 0.25 * rng.gen::<f64>() } else { 0.25 * rng.gen::<f64>() };
            rows.push(DatasetRow {
                account_id: format!("{}{i:04}", if troll { "t" } else { "b" }),
                label: if troll { CorpusLabel::Troll } else { CorpusLabel::Benign },
                provenance: String::new(),
                values,
            });
        }
        Dataset {
            feature_names: (0..n_features).map(|i| format!("f{i}")).collect(),
            rows,
        }
    }
}
