//! MLP classifier on the shared dense-network numerics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledSample;
use super::DetectError;
use crate::agent::Normalizer;
use crate::nn::{DenseNet, Gradients, Loss, Optimizer, OutputActivation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: 64,
            epochs: 50,
            batch_size: 32,
            learning_rate: 3e-3,
        }
    }
}

/// `d -> hidden -> C` softmax network trained with cross-entropy and Adam
/// on normalized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel<T> {
    pub(crate) net: DenseNet<T>,
    pub(crate) normalizer: Normalizer<T>,
    pub(crate) dim: usize,
}

impl<T: Scalar> MlpModel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fit(
        samples: &[&LabeledSample<T>],
        dim: usize,
        n_classes: usize,
        params: &MlpParams,
        normalizer: &Normalizer<T>,
        seed: u64,
    ) -> Result<Self, DetectError> {
        if samples.is_empty() {
            return Err(DetectError::EmptyTrainingSet);
        }
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        use rand::RngCore;
        let net_seed = master.next_u64();
        let shuffle_seed = master.next_u64();

        let normalized: Vec<Vec<T>> = samples
            .iter()
            .map(|s| normalizer.apply(&s.features))
            .collect();
        let mut net = DenseNet::<T>::he_uniform(
            &[dim, params.hidden, n_classes],
            OutputActivation::Softmax,
            net_seed,
        );
        let mut optimizer = Optimizer::adam(T::of(params.learning_rate));
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(shuffle_seed);

        for _ in 0..params.epochs {
            order.shuffle(&mut shuffle_rng);
            for chunk in order.chunks(params.batch_size) {
                let mut grads = Gradients::zeros_like(&net);
                for &i in chunk {
                    let (probs, cache) = net.forward(&normalized[i]);
                    let mut target = vec![T::zero(); n_classes];
                    target[samples[i].label] = T::one();
                    let (_, grad) = Loss::CrossEntropy.eval(&probs, &target);
                    grads.add_assign(&net.backward(&cache, &grad));
                }
                grads.scale(T::one() / T::of(chunk.len() as f64));
                optimizer.step(&mut net, &grads);
            }
        }

        Ok(Self {
            net,
            normalizer: normalizer.clone(),
            dim,
        })
    }

    pub fn predict(&self, features: &[T]) -> Result<usize, DetectError> {
        if features.len() != self.dim {
            return Err(DetectError::DimensionMismatch {
                expected: self.dim,
                got: features.len(),
            });
        }
        let probs = self.net.forward_output(&self.normalizer.apply(features));
        let mut best = 0;
        for c in 1..probs.len() {
            if probs[c] > probs[best] {
                best = c;
            }
        }
        Ok(best)
    }
}
