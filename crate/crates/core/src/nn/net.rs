//! Dense feed-forward network with ReLU hidden layers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{softmax, Matrix};
use crate::scalar::Scalar;

/// Activation applied to the final layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    /// Raw affine output (regression / Q-values).
    Identity,
    /// Softmax over the output layer (classification probabilities).
    Softmax,
}

/// Fully-connected network: `sizes[0]` inputs through ReLU hidden layers to
/// `sizes[last]` outputs.
///
/// Weight matrix `l` has shape `sizes[l+1] x sizes[l]`; biases match the
/// destination layer. Serializes to JSON with full-precision round-tripping,
/// which is the wire format frozen policies use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet<T> {
    sizes: Vec<usize>,
    output: OutputActivation,
    weights: Vec<Matrix<T>>,
    biases: Vec<Vec<T>>,
}

/// Intermediate activations from [`DenseNet::forward`], consumed by
/// [`DenseNet::backward`].
pub struct ForwardCache<T> {
    input: Vec<T>,
    /// Pre-activation of each layer, in order.
    pre: Vec<Vec<T>>,
    /// Post-activation of each layer, in order (last entry is the output).
    post: Vec<Vec<T>>,
}

/// Parameter gradients, shaped exactly like the network parameters.
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    pub weights: Vec<Matrix<T>>,
    pub biases: Vec<Vec<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(net: &DenseNet<T>) -> Self {
        Self {
            weights: net
                .weights
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect(),
            biases: net.biases.iter().map(|b| vec![T::zero(); b.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.add_assign(b);
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }

    pub fn scale(&mut self, s: T) {
        for w in &mut self.weights {
            w.scale(s);
        }
        for b in &mut self.biases {
            for v in b {
                *v *= s;
            }
        }
    }
}

impl<T: Scalar> DenseNet<T> {
    /// He-uniform weight initialization (bound `sqrt(6 / fan_in)`), zero
    /// biases; the standard choice for shallow ReLU stacks.
    pub fn he_uniform(sizes: &[usize], output: OutputActivation, seed: u64) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output layers");
        assert!(sizes.iter().all(|&n| n > 0), "zero-width layer");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::with_capacity(sizes.len() - 1);
        let mut biases = Vec::with_capacity(sizes.len() - 1);
        for l in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let bound = (6.0 / fan_in as f64).sqrt();
            let mut w = Matrix::zeros(fan_out, fan_in);
            for v in w.data_mut() {
                *v = T::of(rng.random_range(-bound..bound));
            }
            weights.push(w);
            biases.push(vec![T::zero(); fan_out]);
        }
        Self {
            sizes: sizes.to_vec(),
            output,
            weights,
            biases,
        }
    }

    /// All-zero parameters (useful for tests and tie-break checks).
    pub fn zeros(sizes: &[usize], output: OutputActivation) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output layers");
        let weights = (0..sizes.len() - 1)
            .map(|l| Matrix::zeros(sizes[l + 1], sizes[l]))
            .collect();
        let biases = (0..sizes.len() - 1)
            .map(|l| vec![T::zero(); sizes[l + 1]])
            .collect();
        Self {
            sizes: sizes.to_vec(),
            output,
            weights,
            biases,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("at least two layers")
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub(crate) fn layers_mut(&mut self) -> (&mut [Matrix<T>], &mut [Vec<T>]) {
        (&mut self.weights, &mut self.biases)
    }

    pub fn weights(&self) -> &[Matrix<T>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<T>] {
        &self.biases
    }

    /// Forward pass returning the output and the cache backward needs.
    ///
    /// Panics on an input length mismatch.
    pub fn forward(&self, input: &[T]) -> (Vec<T>, ForwardCache<T>) {
        assert_eq!(input.len(), self.input_dim(), "input dimension mismatch");
        let layers = self.weights.len();
        let mut pre = Vec::with_capacity(layers);
        let mut post = Vec::with_capacity(layers);
        let mut activation = input.to_vec();
        for l in 0..layers {
            let mut z = self.weights[l].matvec(&activation);
            for (zv, b) in z.iter_mut().zip(&self.biases[l]) {
                *zv += *b;
            }
            let a = if l + 1 == layers {
                match self.output {
                    OutputActivation::Identity => z.clone(),
                    OutputActivation::Softmax => softmax(&z),
                }
            } else {
                z.iter()
                    .map(|&v| if v > T::zero() { v } else { T::zero() })
                    .collect()
            };
            pre.push(z);
            post.push(a.clone());
            activation = a;
        }
        (
            activation,
            ForwardCache {
                input: input.to_vec(),
                pre,
                post,
            },
        )
    }

    /// Forward pass without keeping the cache.
    pub fn forward_output(&self, input: &[T]) -> Vec<T> {
        self.forward(input).0
    }

    /// Exact gradients of a scalar loss w.r.t. all parameters.
    ///
    /// `output_grad` is the loss gradient w.r.t. the network output (after
    /// the output activation); for a softmax head the softmax Jacobian is
    /// applied here.
    pub fn backward(&self, cache: &ForwardCache<T>, output_grad: &[T]) -> Gradients<T> {
        assert_eq!(
            output_grad.len(),
            self.output_dim(),
            "output gradient dimension mismatch"
        );
        let layers = self.weights.len();
        let mut grads = Gradients::zeros_like(self);

        // Gradient w.r.t. the output pre-activation.
        let mut delta: Vec<T> = match self.output {
            OutputActivation::Identity => output_grad.to_vec(),
            OutputActivation::Softmax => {
                // dL/dz_i = p_i * (dL/dp_i - sum_j p_j dL/dp_j)
                let p = &cache.post[layers - 1];
                let dot: T = p
                    .iter()
                    .zip(output_grad)
                    .map(|(&pi, &gi)| pi * gi)
                    .sum();
                p.iter()
                    .zip(output_grad)
                    .map(|(&pi, &gi)| pi * (gi - dot))
                    .collect()
            }
        };

        for l in (0..layers).rev() {
            let upstream = if l == 0 {
                &cache.input
            } else {
                &cache.post[l - 1]
            };
            grads.weights[l].add_outer(&delta, upstream, T::one());
            for (g, d) in grads.biases[l].iter_mut().zip(&delta) {
                *g = *d;
            }
            if l > 0 {
                let back = self.weights[l].matvec_transpose(&delta);
                delta = back
                    .iter()
                    .zip(&cache.pre[l - 1])
                    .map(|(&g, &z)| if z > T::zero() { g } else { T::zero() })
                    .collect();
            }
        }
        grads
    }

    /// Total number of parameters.
    pub fn param_count(&self) -> usize {
        self.weights
            .iter()
            .map(|w| w.rows() * w.cols())
            .sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Reads a parameter by flat index (weights of each layer first, then
    /// its biases). Used by the finite-difference oracle and tests.
    pub fn get_param(&self, mut index: usize) -> T {
        for l in 0..self.weights.len() {
            let wn = self.weights[l].rows() * self.weights[l].cols();
            if index < wn {
                return self.weights[l].data()[index];
            }
            index -= wn;
            if index < self.biases[l].len() {
                return self.biases[l][index];
            }
            index -= self.biases[l].len();
        }
        panic!("parameter index out of range");
    }

    /// Writes a parameter by flat index (see [`Self::get_param`]).
    pub fn set_param(&mut self, mut index: usize, value: T) {
        for l in 0..self.weights.len() {
            let wn = self.weights[l].rows() * self.weights[l].cols();
            if index < wn {
                self.weights[l].data_mut()[index] = value;
                return;
            }
            index -= wn;
            if index < self.biases[l].len() {
                self.biases[l][index] = value;
                return;
            }
            index -= self.biases[l].len();
        }
        panic!("parameter index out of range");
    }

    pub fn all_finite(&self) -> bool {
        self.weights.iter().all(|w| w.all_finite())
            && self
                .biases
                .iter()
                .all(|b| b.iter().all(|v| v.is_finite()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("network serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_net_outputs_zero() {
        let net = DenseNet::<f64>::zeros(&[3, 4, 2], OutputActivation::Identity);
        assert_eq!(net.forward_output(&[1.0, -2.0, 3.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn identity_weight_relu_passes_positive_input_through() {
        let mut net = DenseNet::<f64>::zeros(&[2, 2], OutputActivation::Identity);
        net.weights[0].set(0, 0, 1.0);
        net.weights[0].set(1, 1, 1.0);
        let out = net.forward_output(&[0.5, 2.0]);
        assert_eq!(out, vec![0.5, 2.0]);
    }

    /// Independent scalar-loop recomputation of a 2-3-2 forward pass,
    /// without any matrix code.
    #[test]
    fn forward_matches_scalar_loop_recomputation() {
        let net = DenseNet::<f64>::he_uniform(&[2, 3, 2], OutputActivation::Identity, 99);
        let input = [0.7, -1.3];

        let w0 = net.weights()[0].clone();
        let b0 = net.biases()[0].clone();
        let w1 = net.weights()[1].clone();
        let b1 = net.biases()[1].clone();

        let mut hidden = [0.0f64; 3];
        for (i, h) in hidden.iter_mut().enumerate() {
            let mut z = b0[i];
            for (j, x) in input.iter().enumerate() {
                z += w0.get(i, j) * x;
            }
            *h = z.max(0.0);
        }
        let mut expected = [0.0f64; 2];
        for (i, o) in expected.iter_mut().enumerate() {
            let mut z = b1[i];
            for (j, h) in hidden.iter().enumerate() {
                z += w1.get(i, j) * h;
            }
            *o = z;
        }

        let out = net.forward_output(&input);
        assert!((out[0] - expected[0]).abs() < 1e-15);
        assert!((out[1] - expected[1]).abs() < 1e-15);
    }

    #[test]
    fn zero_loss_gradient_gives_zero_parameter_gradients() {
        let net = DenseNet::<f64>::he_uniform(&[3, 5, 2], OutputActivation::Identity, 7);
        let (_, cache) = net.forward(&[0.1, 0.2, 0.3]);
        let grads = net.backward(&cache, &[0.0, 0.0]);
        for w in &grads.weights {
            assert!(w.data().iter().all(|&v| v == 0.0));
        }
        for b in &grads.biases {
            assert!(b.iter().all(|&v| v == 0.0));
        }
    }

    /// A purely linear map (no hidden layer) under squared loss has the
    /// closed-form gradient of linear regression: dL/dW = 2/n (Wx+b-y) x^T.
    #[test]
    fn linear_net_mse_gradient_matches_residual_formula() {
        let mut net = DenseNet::<f64>::zeros(&[2, 2], OutputActivation::Identity);
        net.weights[0] = Matrix::from_rows(&[vec![0.5, -0.25], vec![1.0, 2.0]]);
        net.biases[0] = vec![0.1, -0.2];
        let x = [1.5, -0.5];
        let y = [1.0, 0.0];

        let (out, cache) = net.forward(&x);
        let n = out.len() as f64;
        let loss_grad: Vec<f64> = out.iter().zip(&y).map(|(o, t)| 2.0 * (o - t) / n).collect();
        let grads = net.backward(&cache, &loss_grad);

        for r in 0..2 {
            let residual = 2.0 / n * (out[r] - y[r]);
            for c in 0..2 {
                let expected = residual * x[c];
                assert!((grads.weights[0].get(r, c) - expected).abs() < 1e-15);
            }
            assert!((grads.biases[0][r] - residual).abs() < 1e-15);
        }
    }

    #[test]
    #[should_panic(expected = "input dimension mismatch")]
    fn forward_rejects_wrong_input_length() {
        let net = DenseNet::<f64>::zeros(&[3, 2], OutputActivation::Identity);
        net.forward_output(&[1.0, 2.0]);
    }

    #[test]
    fn json_round_trip_is_bitwise_exact() {
        let net = DenseNet::<f64>::he_uniform(&[4, 8, 3], OutputActivation::Softmax, 2024);
        let restored = DenseNet::<f64>::from_json(&net.to_json()).unwrap();
        assert_eq!(net, restored);
    }

    #[test]
    fn generic_over_f32_produces_finite_outputs() {
        let net = DenseNet::<f32>::he_uniform(&[4, 8, 2], OutputActivation::Identity, 5);
        let out = net.forward_output(&[0.5, -0.5, 1.0, 2.0]);
        assert!(out.iter().all(|v| v.is_finite()));
    }
}
