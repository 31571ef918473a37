//! Binary classification metrics with troll as the positive class.

use serde::{Deserialize, Serialize};

use crate::model::CorpusLabel;

/// Confusion-matrix derived metrics for one evaluation.
///
/// `precision` and `recall` are reported as 0.0 when their denominators are
/// zero; the `*_defined` flags record whether the value is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub precision_defined: bool,
    pub recall_defined: bool,
}

impl ClassMetrics {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }
}

/// Computes metrics over (truth, predicted) label pairs.
///
/// Unlabeled entries are not expected here; they count as benign so that a
/// malformed caller surfaces as degraded metrics rather than a panic.
pub fn compute_metrics(pairs: &[(CorpusLabel, CorpusLabel)]) -> ClassMetrics {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    let mut tn = 0usize;
    for &(truth, predicted) in pairs {
        let actual_troll = truth == CorpusLabel::Troll;
        let predicted_troll = predicted == CorpusLabel::Troll;
        match (actual_troll, predicted_troll) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let total = tp + fp + fn_ + tn;
    let accuracy = if total == 0 {
        0.0
    } else {
        (tp + tn) as f64 / total as f64
    };
    let precision_defined = tp + fp > 0;
    let precision = if precision_defined {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall_defined = tp + fn_ > 0;
    let recall = if recall_defined {
        tp as f64 / (tp + fn_) as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ClassMetrics {
        accuracy,
        precision,
        recall,
        f1,
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        true_negatives: tn,
        precision_defined,
        recall_defined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CorpusLabel::{Benign, Troll};

    #[test]
    fn perfect_predictions() {
        let pairs = vec![(Troll, Troll), (Benign, Benign), (Troll, Troll)];
        let m = compute_metrics(&pairs);
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 1.0);
        assert_eq!(m.f1, 1.0);
        assert_eq!(m.true_positives, 2);
        assert_eq!(m.true_negatives, 1);
    }

    #[test]
    fn mixed_confusion_counts() {
        // 2 TP, 1 FP, 1 FN, 2 TN.
        let pairs = vec![
            (Troll, Troll),
            (Troll, Troll),
            (Benign, Troll),
            (Troll, Benign),
            (Benign, Benign),
            (Benign, Benign),
        ];
        let m = compute_metrics(&pairs);
        assert_eq!(m.true_positives, 2);
        assert_eq!(m.false_positives, 1);
        assert_eq!(m.false_negatives, 1);
        assert_eq!(m.true_negatives, 2);
        assert!((m.accuracy - 4.0 / 6.0).abs() < 1e-12);
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_denominators_are_flagged_not_nan() {
        // No predicted positives: precision undefined.
        let pairs = vec![(Troll, Benign), (Benign, Benign)];
        let m = compute_metrics(&pairs);
        assert!(!m.precision_defined);
        assert_eq!(m.precision, 0.0);
        assert!(m.recall_defined);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.f1, 0.0);

        // No actual positives: recall undefined.
        let pairs = vec![(Benign, Troll), (Benign, Benign)];
        let m = compute_metrics(&pairs);
        assert!(m.precision_defined);
        assert!(!m.recall_defined);

        let m = compute_metrics(&[]);
        assert_eq!(m.accuracy, 0.0);
        assert_eq!(m.total(), 0);
    }
}
