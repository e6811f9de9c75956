//! Minimal dense-network numerics: matrices, forward pass, exact
//! backpropagation, losses, and first-order optimizers.
//!
//! Deliberately small: fixed dense topologies with ReLU hidden layers and an
//! identity or softmax output, which is all the Q-network and the MLP
//! classifier need. No autograd; gradients are derived by hand and checked
//! against central finite differences in the test suite.

mod loss;
mod matrix;
mod net;
mod optim;

pub use loss::Loss;
pub use matrix::Matrix;
pub use net::{DenseNet, ForwardCache, Gradients, OutputActivation};
pub use optim::{Optimizer, OptimizerKind};

use crate::scalar::Scalar;

/// Numerically safe softmax (max-subtraction before exponentiation).
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}
