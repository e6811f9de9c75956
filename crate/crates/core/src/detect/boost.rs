//! Stage-wise gradient boosting with regression trees on softmax gradients.
//!
//! Each stage fits one depth-limited squared-error tree per class to the
//! residual `one_hot - softmax(score)`; leaf values then take the Newton
//! step `(K-1)/K * sum(r) / sum(p(1-p))` over the samples they hold, and
//! stages accumulate with a fixed learning rate.

use serde::{Deserialize, Serialize};

use super::dataset::LabeledSample;
use super::tree::RegressionTree;
use super::DetectError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostParams {
    pub stages: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            stages: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_leaf: 5,
        }
    }
}

/// `trees[stage][class]`, applied additively with the learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoostModel<T> {
    pub(crate) trees: Vec<Vec<RegressionTree<T>>>,
    pub(crate) learning_rate: f64,
    pub(crate) dim: usize,
    pub(crate) n_classes: usize,
}

impl<T: Scalar> GradientBoostModel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fit(
        samples: &[&LabeledSample<T>],
        dim: usize,
        n_classes: usize,
        params: &BoostParams,
    ) -> Result<Self, DetectError> {
        if samples.is_empty() {
            return Err(DetectError::EmptyTrainingSet);
        }
        let n = samples.len();
        let features: Vec<Vec<T>> = samples.iter().map(|s| s.features.clone()).collect();
        let mut scores = vec![vec![0.0f64; n]; n_classes];
        let mut stages = Vec::with_capacity(params.stages);

        for _ in 0..params.stages {
            // Softmax over class scores per sample.
            let mut probs = vec![vec![0.0f64; n]; n_classes];
            for i in 0..n {
                let mut max = f64::NEG_INFINITY;
                for scores_c in scores.iter() {
                    max = max.max(scores_c[i]);
                }
                let mut total = 0.0;
                for c in 0..n_classes {
                    let e = (scores[c][i] - max).exp();
                    probs[c][i] = e;
                    total += e;
                }
                for probs_c in probs.iter_mut() {
                    probs_c[i] /= total;
                }
            }

            let mut stage_trees = Vec::with_capacity(n_classes);
            let newton_scale = if n_classes > 1 {
                (n_classes as f64 - 1.0) / n_classes as f64
            } else {
                1.0
            };
            for c in 0..n_classes {
                let residuals: Vec<f64> = (0..n)
                    .map(|i| {
                        let y = if samples[i].label == c { 1.0 } else { 0.0 };
                        y - probs[c][i]
                    })
                    .collect();
                let hessians: Vec<f64> = (0..n).map(|i| probs[c][i] * (1.0 - probs[c][i])).collect();
                let mut tree =
                    RegressionTree::fit(&features, &residuals, params.max_depth, params.min_leaf);
                tree.refit_leaves(&features, &residuals, &hessians, newton_scale);
                for i in 0..n {
                    scores[c][i] += params.learning_rate * tree.predict(&features[i]);
                }
                stage_trees.push(tree);
            }
            stages.push(stage_trees);
        }

        Ok(Self {
            trees: stages,
            learning_rate: params.learning_rate,
            dim,
            n_classes,
        })
    }

    /// Class scores (summed stage outputs, scaled by the learning rate).
    pub fn scores(&self, features: &[T]) -> Vec<f64> {
        let mut scores = vec![0.0f64; self.n_classes];
        for stage in &self.trees {
            for (c, tree) in stage.iter().enumerate() {
                scores[c] += self.learning_rate * tree.predict(features);
            }
        }
        scores
    }

    pub fn predict(&self, features: &[T]) -> Result<usize, DetectError> {
        if features.len() != self.dim {
            return Err(DetectError::DimensionMismatch {
                expected: self.dim,
                got: features.len(),
            });
        }
        let scores = self.scores(features);
        let mut best = 0;
        for c in 1..self.n_classes {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        Ok(best)
    }
}
