//! Confusion matrices, precision/recall, and the F-measure.

use serde::{Deserialize, Serialize};

/// Count matrix indexed `[true_class][predicted_class]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            classes,
            counts: vec![vec![0; classes]; classes],
        }
    }

    pub fn from_pairs(classes: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::new(classes);
        for (truth, predicted) in pairs {
            m.record(truth, predicted);
        }
        m
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn count(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|r| r.iter().sum::<usize>()).sum()
    }

    /// Samples whose true class is `c`.
    pub fn row_sum(&self, c: usize) -> usize {
        self.counts[c].iter().sum()
    }

    /// Samples predicted as class `c`.
    pub fn col_sum(&self, c: usize) -> usize {
        self.counts.iter().map(|r| r[c]).sum()
    }

    pub fn true_positives(&self, c: usize) -> usize {
        self.counts[c][c]
    }
}

/// Per-class precision/recall/F rows plus the macro average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub macro_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Harmonic mean of precision and recall; zero when either denominator was
/// zero.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl MetricsReport {
    pub fn from_confusion(matrix: &ConfusionMatrix) -> Self {
        let per_class: Vec<ClassMetrics> = (0..matrix.classes())
            .map(|c| {
                let tp = matrix.true_positives(c) as f64;
                let predicted = matrix.col_sum(c) as f64;
                let actual = matrix.row_sum(c) as f64;
                let precision = if predicted == 0.0 { 0.0 } else { tp / predicted };
                let recall = if actual == 0.0 { 0.0 } else { tp / actual };
                ClassMetrics {
                    class: c,
                    precision,
                    recall,
                    f_measure: f_measure(precision, recall),
                }
            })
            .collect();
        let macro_f = per_class.iter().map(|m| m.f_measure).sum::<f64>()
            / per_class.len().max(1) as f64;
        Self { per_class, macro_f }
    }
}
