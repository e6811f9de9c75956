//! Central finite-difference verification of the analytic gradients.
//!
//! The oracle perturbs each parameter by +-h and differences the loss; it
//! never touches the backward pass it checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smartedge_core::nn::{DenseNet, Loss, OutputActivation};

const H: f64 = 1e-5;
const MAX_REL_ERR: f64 = 1e-4;
const ABS_FLOOR: f64 = 1e-8;

fn loss_of(net: &DenseNet<f64>, loss: Loss, input: &[f64], target: &[f64]) -> f64 {
    let out = net.forward_output(input);
    loss.eval(&out, target).0
}

fn analytic_gradients(
    net: &DenseNet<f64>,
    loss: Loss,
    input: &[f64],
    target: &[f64],
) -> Vec<f64> {
    let (out, cache) = net.forward(input);
    let (_, out_grad) = loss.eval(&out, target);
    let grads = net.backward(&cache, &out_grad);
    // Flatten in the same order as the flat parameter indexing.
    let mut flat = Vec::with_capacity(net.param_count());
    for l in 0..grads.weights.len() {
        flat.extend_from_slice(grads.weights[l].data());
        flat.extend_from_slice(&grads.biases[l]);
    }
    flat
}

/// Max relative error of analytic vs central-difference gradients.
fn max_gradient_error(
    net: &DenseNet<f64>,
    loss: Loss,
    input: &[f64],
    target: &[f64],
) -> f64 {
    let analytic = analytic_gradients(net, loss, input, target);
    let mut worst = 0.0f64;
    for p in 0..net.param_count() {
        let original = net.get_param(p);
        let mut plus = net.clone();
        plus.set_param(p, original + H);
        let mut minus = net.clone();
        minus.set_param(p, original - H);
        let numeric = (loss_of(&plus, loss, input, target)
            - loss_of(&minus, loss, input, target))
            / (2.0 * H);
        let a = analytic[p];
        let denom = a.abs().max(numeric.abs());
        let err = if (a - numeric).abs() <= ABS_FLOOR {
            0.0
        } else {
            (a - numeric).abs() / denom
        };
        worst = worst.max(err);
    }
    worst
}

fn random_input(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect()
}

/// True when any hidden ReLU preactivation sits close enough to zero that
/// an h-sized parameter perturbation could cross the kink, where central
/// differences stop being a valid derivative oracle.
fn near_relu_kink(net: &DenseNet<f64>, input: &[f64]) -> bool {
    const MARGIN: f64 = 1e-3;
    let mut activation = input.to_vec();
    let layers = net.weights().len();
    for l in 0..layers - 1 {
        let w = &net.weights()[l];
        let mut next = vec![0.0; w.rows()];
        for (r, out) in next.iter_mut().enumerate() {
            let mut z = net.biases()[l][r];
            for (c, a) in activation.iter().enumerate() {
                z += w.get(r, c) * a;
            }
            if z.abs() < MARGIN {
                return true;
            }
            *out = z.max(0.0);
        }
        activation = next;
    }
    false
}

fn one_hot(rng: &mut ChaCha8Rng, classes: usize) -> Vec<f64> {
    let mut t = vec![0.0; classes];
    t[rng.random_range(0..classes)] = 1.0;
    t
}

fn random_sizes(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let depth = rng.random_range(1..=3);
    let mut sizes = vec![rng.random_range(2..6)];
    for _ in 0..depth {
        sizes.push(rng.random_range(2..8));
    }
    sizes.push(rng.random_range(2..5));
    sizes
}

#[test]
fn identity_mse_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0;
    let mut trial = 0;
    while checked < 20 {
        trial += 1;
        let sizes = random_sizes(&mut rng);
        let net = DenseNet::<f64>::he_uniform(&sizes, OutputActivation::Identity, 1000 + trial);
        let input = random_input(&mut rng, sizes[0]);
        let target = random_input(&mut rng, *sizes.last().unwrap());
        if near_relu_kink(&net, &input) {
            continue;
        }
        let err = max_gradient_error(&net, Loss::Mse, &input, &target);
        assert!(err < MAX_REL_ERR, "trial {trial}: rel err {err}");
        checked += 1;
    }
}

#[test]
fn softmax_cross_entropy_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0;
    let mut trial = 0;
    while checked < 20 {
        trial += 1;
        let sizes = random_sizes(&mut rng);
        let net = DenseNet::<f64>::he_uniform(&sizes, OutputActivation::Softmax, 2000 + trial);
        let input = random_input(&mut rng, sizes[0]);
        let target = one_hot(&mut rng, *sizes.last().unwrap());
        if near_relu_kink(&net, &input) {
            continue;
        }
        let err = max_gradient_error(&net, Loss::CrossEntropy, &input, &target);
        assert!(err < MAX_REL_ERR, "trial {trial}: rel err {err}");
        checked += 1;
    }
}

#[test]
fn identity_hinge_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut checked = 0;
    let mut trial = 0;
    while checked < 20 {
        trial += 1;
        let sizes = random_sizes(&mut rng);
        let net = DenseNet::<f64>::he_uniform(&sizes, OutputActivation::Identity, 3000 + trial);
        let input = random_input(&mut rng, sizes[0]);
        let target: Vec<f64> = (0..*sizes.last().unwrap())
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        // The hinge is non-differentiable where y*f = 1; finite differences
        // are invalid within h of that kink too, so resample such draws.
        let out = net.forward_output(&input);
        let near_hinge_kink = out
            .iter()
            .zip(&target)
            .any(|(&f, &y)| (y * f - 1.0).abs() < 1e-3);
        if near_hinge_kink || near_relu_kink(&net, &input) {
            continue;
        }
        let err = max_gradient_error(&net, Loss::Hinge, &input, &target);
        assert!(err < MAX_REL_ERR, "trial {trial}: rel err {err}");
        checked += 1;
    }
}

/// The production Q-network shape.
#[test]
fn q_network_shape_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let sizes = [13, 32, 32, 4];
    let mut seed = 4040;
    loop {
        let net = DenseNet::<f64>::he_uniform(&sizes, OutputActivation::Identity, seed);
        let input = random_input(&mut rng, 13);
        let target = random_input(&mut rng, 4);
        if near_relu_kink(&net, &input) {
            seed += 1;
            continue;
        }
        let err = max_gradient_error(&net, Loss::Mse, &input, &target);
        assert!(err < MAX_REL_ERR, "rel err {err}");
        break;
    }
}

/// Capability smoke test: a 2-16-1 net fits XOR under full-batch MSE.
#[test]
fn xor_training_reaches_low_loss() {
    use smartedge_core::nn::{Gradients, Optimizer};
    let data = [
        ([0.0, 0.0], 0.0),
        ([0.0, 1.0], 1.0),
        ([1.0, 0.0], 1.0),
        ([1.0, 1.0], 0.0),
    ];
    let mut net = DenseNet::<f64>::he_uniform(&[2, 16, 1], OutputActivation::Identity, 7);
    let mut opt = Optimizer::adam(1e-2);
    let mut loss_value = f64::INFINITY;
    for _ in 0..5000 {
        let mut grads = Gradients::zeros_like(&net);
        loss_value = 0.0;
        for (x, y) in &data {
            let (out, cache) = net.forward(x);
            let (l, g) = Loss::Mse.eval(&out, &[*y]);
            loss_value += l / data.len() as f64;
            grads.add_assign(&net.backward(&cache, &g));
        }
        grads.scale(0.25);
        opt.step(&mut net, &grads);
        if loss_value < 0.01 {
            break;
        }
    }
    assert!(loss_value < 0.01, "final loss {loss_value}");
}

/// f32 instantiation of the same machinery, at a tolerance matching single
/// precision.
#[test]
fn f32_gradients_match_finite_differences_loosely() {
    let net = DenseNet::<f32>::he_uniform(&[4, 8, 3], OutputActivation::Identity, 99);
    let input = [0.3f32, -0.8, 1.1, 0.5];
    let target = [0.5f32, -0.25, 0.75];
    let (out, cache) = net.forward(&input);
    let (_, out_grad) = Loss::Mse.eval(&out, &target);
    let grads = net.backward(&cache, &out_grad);
    let mut flat = Vec::new();
    for l in 0..grads.weights.len() {
        flat.extend_from_slice(grads.weights[l].data());
        flat.extend_from_slice(&grads.biases[l]);
    }
    let h = 1e-2f32;
    for p in 0..net.param_count() {
        let original = net.get_param(p);
        let mut plus = net.clone();
        plus.set_param(p, original + h);
        let mut minus = net.clone();
        minus.set_param(p, original - h);
        let lp = Loss::Mse.eval(&plus.forward_output(&input), &target).0;
        let lm = Loss::Mse.eval(&minus.forward_output(&input), &target).0;
        let numeric = (lp - lm) / (2.0 * h);
        let a = flat[p];
        if (a - numeric).abs() > 1e-3 {
            let denom = a.abs().max(numeric.abs()).max(1e-3);
            assert!(
                (a - numeric).abs() / denom < 2e-2,
                "param {p}: analytic {a}, numeric {numeric}"
            );
        }
    }
}
