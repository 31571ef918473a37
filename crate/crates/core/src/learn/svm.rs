//! Linear SVM trained by SGD on the primal hinge loss with L2
//! regularization, on min-max-scaled features. The schedule is fixed:
//! a set number of epochs, one deterministic shuffle per epoch, step
//! size 1/(lambda * t). The score is a sigmoid of the margin, so 0.5
//! corresponds exactly to the decision boundary.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scaler::MinMaxScaler;
use super::TrainConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: MinMaxScaler,
}

impl SvmModel {
    fn margin(&self, scaled: &[f64]) -> f64 {
        self.weights.iter().zip(scaled).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    pub fn score(&self, values: &[f64]) -> f64 {
        let scaled = self.scaler.transform(values);
        let m = self.margin(&scaled);
        1.0 / (1.0 + (-m).exp())
    }
}

pub(super) fn train(xs: &[&[f64]], ys: &[bool], config: &TrainConfig) -> Result<SvmModel> {
    if config.svm_c <= 0.0 {
        return Err(Error::InvalidArgument("svm C must be positive".into()));
    }
    if config.svm_epochs == 0 {
        return Err(Error::InvalidArgument("svm needs at least one epoch".into()));
    }
    let scaler = MinMaxScaler::fit(xs);
    let rows: Vec<Vec<f64>> = xs.iter().map(|r| scaler.transform(r)).collect();
    let targets: Vec<f64> = ys.iter().map(|&y| if y { 1.0 } else { -1.0 }).collect();

    let n = rows.len();
    let d = rows[0].len();
    let lambda = 1.0 / (config.svm_c * n as f64);
    let mut weights = vec![0.0f64; d];
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut t = 0u64;
    for _ in 0..config.svm_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &rows[i];
            let y = targets[i];
            let margin = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias;
            let shrink = 1.0 - eta * lambda;
            for w in &mut weights {
                *w *= shrink;
            }
            if y * margin < 1.0 {
                for (w, v) in weights.iter_mut().zip(x) {
                    *w += eta * y * v;
                }
                bias += eta * y;
            }
        }
    }
    Ok(SvmModel { weights, bias, scaler })
}
