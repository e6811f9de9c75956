//! Loss functions and their analytic gradients.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Probabilities are clamped here before taking logarithms so the
/// cross-entropy loss stays finite.
const LOG_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// Mean squared error over the output components.
    Mse,
    /// `-sum(target * ln(pred))`; expects `pred` to be probabilities.
    CrossEntropy,
    /// `sum(max(0, 1 - target * pred))` with targets in `{-1, +1}`.
    Hinge,
}

impl Loss {
    /// Loss value and its gradient w.r.t. the prediction vector.
    ///
    /// Panics if the prediction and target lengths differ.
    pub fn eval<T: Scalar>(self, prediction: &[T], target: &[T]) -> (T, Vec<T>) {
        assert_eq!(
            prediction.len(),
            target.len(),
            "prediction/target shape mismatch"
        );
        match self {
            Loss::Mse => {
                let n = T::of(prediction.len() as f64);
                let mut loss = T::zero();
                let mut grad = Vec::with_capacity(prediction.len());
                for (&p, &t) in prediction.iter().zip(target) {
                    let d = p - t;
                    loss += d * d;
                    grad.push(T::of(2.0) * d / n);
                }
                (loss / n, grad)
            }
            Loss::CrossEntropy => {
                let clamp = T::of(LOG_CLAMP);
                let mut loss = T::zero();
                let mut grad = Vec::with_capacity(prediction.len());
                for (&p, &t) in prediction.iter().zip(target) {
                    let pc = if p > clamp { p } else { clamp };
                    loss -= t * pc.ln();
                    grad.push(-t / pc);
                }
                (loss, grad)
            }
            Loss::Hinge => {
                let mut loss = T::zero();
                let mut grad = Vec::with_capacity(prediction.len());
                for (&p, &t) in prediction.iter().zip(target) {
                    let margin = T::one() - t * p;
                    if margin > T::zero() {
                        loss += margin;
                        grad.push(-t);
                    } else {
                        grad.push(T::zero());
                    }
                }
                (loss, grad)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_is_zero_at_target() {
        let (loss, grad) = Loss::Mse.eval(&[1.0f64, -2.0, 0.5], &[1.0, -2.0, 0.5]);
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn cross_entropy_of_uniform_softmax_is_ln_of_class_count() {
        let p = [0.2f64; 5];
        let t = [0.0, 0.0, 1.0, 0.0, 0.0];
        let (loss, _) = Loss::CrossEntropy.eval(&p, &t);
        assert!((loss - 1.6094379124341003).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_stays_finite_at_zero_probability() {
        let (loss, grad) = Loss::CrossEntropy.eval(&[0.0f64, 1.0], &[1.0, 0.0]);
        assert!(loss.is_finite());
        assert!(grad.iter().all(|g| g.is_finite()));
    }

    #[test]
    fn hinge_is_zero_with_satisfied_margin() {
        let (loss, grad) = Loss::Hinge.eval(&[1.5f64, -2.0], &[1.0, -1.0]);
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn hinge_penalizes_violated_margin_linearly() {
        let (loss, grad) = Loss::Hinge.eval(&[0.25f64], &[1.0]);
        assert!((loss - 0.75).abs() < 1e-15);
        assert_eq!(grad, vec![-1.0]);
    }

    #[test]
    #[should_panic(expected = "shape mismatch")]
    fn mismatched_shapes_panic() {
        Loss::Mse.eval(&[1.0f64], &[1.0, 2.0]);
    }
}
