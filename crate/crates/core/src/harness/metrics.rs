use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary classification scores with class 1 as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl MetricSet {
    pub fn from_counts(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let accuracy = ratio(tp + tn, tp + fp + tn + fn_);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn) whenever P+R > 0.
        let f1 = ratio(2 * tp, 2 * tp + fp + fn_);
        MetricSet { accuracy, precision, recall, f1, tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn compute_metrics(true_labels: &[u8], predicted: &[u8]) -> Result<MetricSet> {
    if true_labels.len() != predicted.len() {
        return Err(Error::LengthMismatch { expected: true_labels.len(), got: predicted.len() });
    }
    if true_labels.is_empty() {
        return Err(Error::Empty("label vectors"));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&y, &p) in true_labels.iter().zip(predicted) {
        match (y, p) {
            (1, 1) => tp += 1,
            (0, 1) => fp += 1,
            (0, 0) => tn += 1,
            (1, 0) => fn_ += 1,
            _ => return Err(Error::NonBinaryLabel(y.max(p) as f64)),
        }
    }
    Ok(MetricSet::from_counts(tp, fp, tn, fn_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let m = compute_metrics(&[1, 1, 0, 0], &[1, 0, 0, 0]).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 0.5);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_division() {
        let m = compute_metrics(&[1, 0, 1], &[0, 0, 0]).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn f1_matches_harmonic_mean() {
        let m = MetricSet::from_counts(7, 3, 11, 5);
        let (p, r) = (m.precision, m.recall);
        assert!((m.f1 - 2.0 * p * r / (p + r)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(compute_metrics(&[1], &[1, 0]).is_err());
        assert!(compute_metrics(&[], &[]).is_err());
        assert!(matches!(compute_metrics(&[2], &[1]), Err(Error::NonBinaryLabel(_))));
    }
}
