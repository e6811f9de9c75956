//! First-order optimizers over [`DenseNet`] parameters.

use serde::{Deserialize, Serialize};

use super::{DenseNet, Gradients};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    /// Classic momentum: `v = mu*v + g; p -= lr*v`.
    SgdMomentum { momentum: f64 },
    /// Adam with bias correction.
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

/// Optimizer with per-parameter state buffers shaped like the network.
#[derive(Debug, Clone)]
pub struct Optimizer<T> {
    kind: OptimizerKind,
    learning_rate: T,
    steps: u64,
    first_moment: Option<Gradients<T>>,
    second_moment: Option<Gradients<T>>,
}

impl<T: Scalar> Optimizer<T> {
    pub fn sgd(learning_rate: T, momentum: f64) -> Self {
        Self {
            kind: OptimizerKind::SgdMomentum { momentum },
            learning_rate,
            steps: 0,
            first_moment: None,
            second_moment: None,
        }
    }

    /// Adam with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-8).
    pub fn adam(learning_rate: T) -> Self {
        Self::adam_with(learning_rate, 0.9, 0.999, 1e-8)
    }

    pub fn adam_with(learning_rate: T, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            kind: OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            },
            learning_rate,
            steps: 0,
            first_moment: None,
            second_moment: None,
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    /// Applies one update in place. State buffers are allocated lazily and
    /// must keep matching the network's shape afterwards.
    pub fn step(&mut self, net: &mut DenseNet<T>, grads: &Gradients<T>) {
        self.steps += 1;
        match self.kind {
            OptimizerKind::SgdMomentum { momentum } => {
                let mu = T::of(momentum);
                let lr = self.learning_rate;
                let velocity = self
                    .first_moment
                    .get_or_insert_with(|| Gradients::zeros_like(net));
                let (weights, biases) = net.layers_mut();
                for l in 0..weights.len() {
                    let v = velocity.weights[l].data_mut();
                    let g = grads.weights[l].data();
                    let p = weights[l].data_mut();
                    for i in 0..p.len() {
                        v[i] = mu * v[i] + g[i];
                        p[i] -= lr * v[i];
                    }
                    let vb = &mut velocity.biases[l];
                    let gb = &grads.biases[l];
                    let pb = &mut biases[l];
                    for i in 0..pb.len() {
                        vb[i] = mu * vb[i] + gb[i];
                        pb[i] -= lr * vb[i];
                    }
                }
            }
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            } => {
                let b1 = T::of(beta1);
                let b2 = T::of(beta2);
                let eps = T::of(epsilon);
                let lr = self.learning_rate;
                let t = self.steps as i32;
                let corr1 = T::one() - T::of(beta1.powi(t));
                let corr2 = T::one() - T::of(beta2.powi(t));
                if self.first_moment.is_none() {
                    self.first_moment = Some(Gradients::zeros_like(net));
                    self.second_moment = Some(Gradients::zeros_like(net));
                }
                let m = self.first_moment.as_mut().expect("just initialized");
                let v = self.second_moment.as_mut().expect("just initialized");
                let (weights, biases) = net.layers_mut();
                for l in 0..weights.len() {
                    adam_update(
                        weights[l].data_mut(),
                        grads.weights[l].data(),
                        m.weights[l].data_mut(),
                        v.weights[l].data_mut(),
                        lr,
                        b1,
                        b2,
                        eps,
                        corr1,
                        corr2,
                    );
                    adam_update(
                        &mut biases[l],
                        &grads.biases[l],
                        &mut m.biases[l],
                        &mut v.biases[l],
                        lr,
                        b1,
                        b2,
                        eps,
                        corr1,
                        corr2,
                    );
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update<T: Scalar>(
    params: &mut [T],
    grads: &[T],
    m: &mut [T],
    v: &mut [T],
    lr: T,
    b1: T,
    b2: T,
    eps: T,
    corr1: T,
    corr2: T,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = b1 * m[i] + (T::one() - b1) * g;
        v[i] = b2 * v[i] + (T::one() - b2) * g * g;
        let m_hat = m[i] / corr1;
        let v_hat = v[i] / corr2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::OutputActivation;

    fn tiny_net() -> DenseNet<f64> {
        DenseNet::zeros(&[1, 1], OutputActivation::Identity)
    }

    fn grad_of(net: &DenseNet<f64>, value: f64) -> Gradients<f64> {
        let mut g = Gradients::zeros_like(net);
        g.weights[0].data_mut()[0] = value;
        g
    }

    #[test]
    fn zero_gradient_with_zero_state_is_a_no_op() {
        let mut net = tiny_net();
        net.set_param(0, 0.7);
        let g = grad_of(&net, 0.0);
        let mut sgd = Optimizer::sgd(0.1, 0.9);
        sgd.step(&mut net, &g);
        assert_eq!(net.get_param(0), 0.7);

        let mut adam = Optimizer::adam(0.1);
        adam.step(&mut net, &g);
        assert_eq!(net.get_param(0), 0.7);
    }

    #[test]
    fn single_sgd_step_moves_against_the_gradient() {
        let mut net = tiny_net();
        net.set_param(0, 1.0);
        let g = grad_of(&net, 0.5);
        let mut sgd = Optimizer::sgd(0.1, 0.9);
        sgd.step(&mut net, &g);
        assert!((net.get_param(0) - (1.0 - 0.1 * 0.5)).abs() < 1e-15);
    }

    /// Hand-evaluated Adam recurrence at t=1:
    /// m_hat = g, v_hat = g^2, update = lr * g / (|g| + eps).
    #[test]
    fn adam_first_step_matches_scalar_hand_computation() {
        let g_val = 0.3f64;
        let lr = 0.01f64;
        let eps = 1e-8f64;
        let mut net = tiny_net();
        let g = grad_of(&net, g_val);
        let mut adam = Optimizer::adam(lr);
        adam.step(&mut net, &g);

        let m = 0.1 * g_val; // (1-b1)*g
        let v = 0.001 * g_val * g_val; // (1-b2)*g^2
        let m_hat = m / (1.0 - 0.9);
        let v_hat = v / (1.0 - 0.999);
        let expected = -lr * m_hat / (v_hat.sqrt() + eps);
        assert!((net.get_param(0) - expected).abs() < 1e-15);
        // Magnitude is lr scaled by ~1 regardless of gradient size.
        assert!((net.get_param(0).abs() - lr).abs() < 1e-6);
    }

    #[test]
    fn adam_is_deterministic_across_replays() {
        let mut a = DenseNet::<f64>::he_uniform(&[2, 4, 1], OutputActivation::Identity, 3);
        let mut b = a.clone();
        let mut opt_a = Optimizer::adam(1e-3);
        let mut opt_b = Optimizer::adam(1e-3);
        for step in 0..25 {
            let (out_a, cache_a) = a.forward(&[0.3, -0.6]);
            let g_a = a.backward(&cache_a, &[out_a[0] - step as f64]);
            opt_a.step(&mut a, &g_a);

            let (out_b, cache_b) = b.forward(&[0.3, -0.6]);
            let g_b = b.backward(&cache_b, &[out_b[0] - step as f64]);
            opt_b.step(&mut b, &g_b);
        }
        assert_eq!(a, b);
    }
}
