//! Linear one-vs-rest SVM trained with hinge-loss SGD.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledSample;
use super::DetectError;
use crate::agent::Normalizer;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 50,
            l2: 1e-4,
        }
    }
}

/// One linear scorer per class; inputs are normalized with the recorded
/// constants before scoring. Prediction is the arg-max score with
/// lowest-label tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel<T> {
    pub(crate) weights: Vec<Vec<T>>,
    pub(crate) biases: Vec<T>,
    pub(crate) normalizer: Normalizer<T>,
    pub(crate) dim: usize,
}

impl<T: Scalar> LinearSvmModel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fit(
        samples: &[&LabeledSample<T>],
        dim: usize,
        n_classes: usize,
        params: &SvmParams,
        normalizer: &Normalizer<T>,
        seed: u64,
    ) -> Result<Self, DetectError> {
        if samples.is_empty() {
            return Err(DetectError::EmptyTrainingSet);
        }
        let normalized: Vec<Vec<T>> = samples
            .iter()
            .map(|s| normalizer.apply(&s.features))
            .collect();
        let lr = T::of(params.learning_rate);
        let decay = T::one() - lr * T::of(params.l2);
        let mut weights = vec![vec![T::zero(); dim]; n_classes];
        let mut biases = vec![T::zero(); n_classes];
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let x = &normalized[i];
                for c in 0..n_classes {
                    let y = if samples[i].label == c {
                        T::one()
                    } else {
                        -T::one()
                    };
                    let mut score = biases[c];
                    for (w, xv) in weights[c].iter().zip(x) {
                        score += *w * *xv;
                    }
                    // L2 shrinkage every visit; hinge push only when the
                    // margin is violated.
                    for w in weights[c].iter_mut() {
                        *w *= decay;
                    }
                    if y * score < T::one() {
                        for (w, xv) in weights[c].iter_mut().zip(x) {
                            *w += lr * y * *xv;
                        }
                        biases[c] += lr * y;
                    }
                }
            }
        }

        Ok(Self {
            weights,
            biases,
            normalizer: normalizer.clone(),
            dim,
        })
    }

    pub fn scores(&self, features: &[T]) -> Vec<T> {
        let x = self.normalizer.apply(features);
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, &b)| {
                let mut s = b;
                for (wv, xv) in w.iter().zip(&x) {
                    s += *wv * *xv;
                }
                s
            })
            .collect()
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
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        Ok(best)
    }
}
