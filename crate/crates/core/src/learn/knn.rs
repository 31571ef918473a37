//! k-nearest-neighbors on min-max-scaled features, Euclidean distance.
//! The score is the troll fraction among the k nearest training rows;
//! distance ties break on the lower training-row index, so prediction
//! is fully deterministic.

use serde::{Deserialize, Serialize};

use super::scaler::MinMaxScaler;
use super::TrainConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub scaler: MinMaxScaler,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl KnnModel {
    pub fn score(&self, values: &[f64]) -> f64 {
        let q = self.scaler.transform(values);
        let mut dists: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d2: f64 = p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let k = self.k.min(dists.len()).max(1);
        let trolls = dists[..k].iter().filter(|(_, i)| self.labels[*i]).count();
        trolls as f64 / k as f64
    }
}

pub(super) fn train(xs: &[&[f64]], ys: &[bool], config: &TrainConfig) -> Result<KnnModel> {
    if config.knn_k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let scaler = MinMaxScaler::fit(xs);
    let points: Vec<Vec<f64>> = xs.iter().map(|r| scaler.transform(r)).collect();
    Ok(KnnModel { k: config.knn_k, scaler, points, labels: ys.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::super::Algorithm;
    use super::*;

    fn model(points: &[(f64, bool)], k: usize) -> KnnModel {
        let xs: Vec<Vec<f64>> = points.iter().map(|(x, _)| vec![*x]).collect();
        let ys: Vec<bool> = points.iter().map(|(_, y)| *y).collect();
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let mut config = TrainConfig::new(Algorithm::Knn, 0);
        config.knn_k = k;
        train(&refs, &ys, &config).unwrap()
    }

    #[test]
    fn majority_of_neighbors_wins() {
        let m = model(
            &[(0.0, false), (0.1, false), (0.2, false), (10.0, true), (10.1, true)],
            3,
        );
        assert!(m.score(&[0.05]) < 0.5);
        assert!(m.score(&[10.05]) > 0.5);
    }

    #[test]
    fn score_is_neighbor_fraction() {
        let m = model(&[(0.0, true), (1.0, true), (2.0, false), (3.0, false), (4.0, false)], 5);
        // All five points are the neighborhood: 2 trolls of 5.
        assert_eq!(m.score(&[2.0]), 0.4);
    }

    #[test]
    fn k_larger_than_training_uses_all() {
        let m = model(&[(0.0, true), (1.0, false)], 5);
        assert_eq!(m.score(&[0.0]), 0.5);
    }

    #[test]
    fn distance_ties_break_on_index() {
        // Two points equidistant from the query, opposite labels, k=1:
        // the earlier row wins.
        let m = model(&[(1.0, true), (3.0, false)], 1);
        assert_eq!(m.score(&[2.0]), 1.0);
    }

    #[test]
    fn scaling_makes_features_commensurate() {
        // Feature 1 spans thousands; unscaled it would drown feature 0.
        let xs: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![0.1, 5000.0],
            vec![1.0, 2500.0],
            vec![0.9, 2400.0],
        ];
        let ys = vec![false, false, true, true];
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let mut config = TrainConfig::new(Algorithm::Knn, 0);
        config.knn_k = 1;
        let m = train(&refs, &ys, &config).unwrap();
        assert!(m.score(&[0.95, 2450.0]) > 0.5);
        assert!(m.score(&[0.05, 100.0]) < 0.5);
    }
}
