//! CART-style decision trees: Gini classification trees and squared-error
//! regression trees (the boosting base learner).

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledSample;
use super::DetectError;
use crate::scalar::Scalar;

/// Classification tree hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 12,
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) enum Node<T> {
    Leaf {
        label: usize,
    },
    Split {
        feature: usize,
        threshold: T,
        left: Box<Node<T>>,
        right: Box<Node<T>>,
    },
}

impl<T: Scalar> Node<T> {
    fn predict(&self, x: &[T]) -> usize {
        match self {
            Node::Leaf { label } => *label,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// A trained Gini decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel<T> {
    pub(crate) root: Node<T>,
    pub(crate) dim: usize,
    pub(crate) n_classes: usize,
}

impl<T: Scalar> DecisionTreeModel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn predict(&self, features: &[T]) -> Result<usize, DetectError> {
        if features.len() != self.dim {
            return Err(DetectError::DimensionMismatch {
                expected: self.dim,
                got: features.len(),
            });
        }
        Ok(self.root.predict(features))
    }

    /// Fits a tree on the referenced samples. `features_per_split` limits
    /// the candidate features tried at each node (the forest's subsampling);
    /// `None` tries all.
    pub fn fit(
        samples: &[&LabeledSample<T>],
        dim: usize,
        n_classes: usize,
        params: &TreeParams,
        features_per_split: Option<usize>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, DetectError> {
        if samples.is_empty() {
            return Err(DetectError::EmptyTrainingSet);
        }
        let indices: Vec<usize> = (0..samples.len()).collect();
        let root = build_node(
            samples,
            &indices,
            n_classes,
            params,
            features_per_split,
            dim,
            0,
            rng,
        );
        Ok(Self {
            root,
            dim,
            n_classes,
        })
    }
}

fn majority_label<T>(samples: &[&LabeledSample<T>], indices: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for &i in indices {
        counts[samples[i].label] += 1;
    }
    let mut best = 0;
    for c in 1..n_classes {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best
}

fn gini_impurity(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    weighted_impurity: f64,
}

#[allow(clippy::too_many_arguments)]
fn build_node<T: Scalar>(
    samples: &[&LabeledSample<T>],
    indices: &[usize],
    n_classes: usize,
    params: &TreeParams,
    features_per_split: Option<usize>,
    dim: usize,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Node<T> {
    let leaf = || Node::Leaf {
        label: majority_label(samples, indices, n_classes),
    };

    let mut counts = vec![0usize; n_classes];
    for &i in indices {
        counts[samples[i].label] += 1;
    }
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if depth >= params.max_depth || pure || indices.len() < 2 * params.min_leaf {
        return leaf();
    }

    let candidates: Vec<usize> = match features_per_split {
        Some(k) if k < dim => {
            let mut all: Vec<usize> = (0..dim).collect();
            all.shuffle(rng);
            let mut picked: Vec<usize> = all.into_iter().take(k).collect();
            picked.sort_unstable();
            picked
        }
        _ => (0..dim).collect(),
    };

    let mut best: Option<BestSplit<T>> = None;
    let mut sorted = indices.to_vec();
    for &feature in &candidates {
        sorted.sort_by(|&a, &b| {
            samples[a].features[feature]
                .partial_cmp(&samples[b].features[feature])
                .expect("finite features")
        });
        let mut left_counts = vec![0usize; n_classes];
        let total = sorted.len();
        for pos in 0..total - 1 {
            left_counts[samples[sorted[pos]].label] += 1;
            let left_n = pos + 1;
            let right_n = total - left_n;
            let a = samples[sorted[pos]].features[feature];
            let b = samples[sorted[pos + 1]].features[feature];
            if a == b {
                continue; // no threshold separates equal values
            }
            if left_n < params.min_leaf || right_n < params.min_leaf {
                continue;
            }
            let right_counts: Vec<usize> = counts
                .iter()
                .zip(&left_counts)
                .map(|(&all, &l)| all - l)
                .collect();
            let weighted = (left_n as f64 * gini_impurity(&left_counts, left_n)
                + right_n as f64 * gini_impurity(&right_counts, right_n))
                / total as f64;
            // Zero-gain splits are allowed (a Gini plateau can still hide a
            // deeper separation, as in the XOR layout); ties keep the first
            // candidate, i.e. the lowest feature and threshold.
            let improves = match &best {
                None => true,
                Some(b) => weighted < b.weighted_impurity - 1e-12,
            };
            if improves {
                best = Some(BestSplit {
                    feature,
                    threshold: (a + b) / T::of(2.0),
                    weighted_impurity: weighted,
                });
            }
        }
    }

    match best {
        None => leaf(),
        Some(split) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                .iter()
                .partition(|&&i| samples[i].features[split.feature] <= split.threshold);
            let left = build_node(
                samples,
                &left_idx,
                n_classes,
                params,
                features_per_split,
                dim,
                depth + 1,
                rng,
            );
            let right = build_node(
                samples,
                &right_idx,
                n_classes,
                params,
                features_per_split,
                dim,
                depth + 1,
                rng,
            );
            Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Regression trees (boosting base learner)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) enum RegNode<T> {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: T,
        left: Box<RegNode<T>>,
        right: Box<RegNode<T>>,
    },
}

impl<T: Scalar> RegNode<T> {
    fn predict(&self, x: &[T]) -> f64 {
        match self {
            RegNode::Leaf { value } => *value,
            RegNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }
}

/// Squared-error regression tree with mean-value leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree<T> {
    pub(crate) root: RegNode<T>,
    pub(crate) dim: usize,
}

impl<T: Scalar> RegressionTree<T> {
    pub fn predict(&self, features: &[T]) -> f64 {
        self.root.predict(features)
    }

    /// Replaces each leaf's value with
    /// `scale * sum(numerator) / max(sum(denominator), eps)` over the
    /// training samples routed to it (the Newton step used by
    /// gradient-boosting stages).
    pub fn refit_leaves(
        &mut self,
        features: &[Vec<T>],
        numerators: &[f64],
        denominators: &[f64],
        scale: f64,
    ) {
        fn walk<'a, T: Scalar>(
            node: &'a mut RegNode<T>,
            leaves: &mut Vec<(&'a mut f64, Vec<usize>)>,
            indices: Vec<usize>,
            features: &[Vec<T>],
        ) {
            match node {
                RegNode::Leaf { value } => leaves.push((value, indices)),
                RegNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let (l, r): (Vec<usize>, Vec<usize>) = indices
                        .into_iter()
                        .partition(|&i| features[i][*feature] <= *threshold);
                    walk(left, leaves, l, features);
                    walk(right, leaves, r, features);
                }
            }
        }
        let mut leaves = Vec::new();
        walk(
            &mut self.root,
            &mut leaves,
            (0..features.len()).collect(),
            features,
        );
        for (value, indices) in leaves {
            let num: f64 = indices.iter().map(|&i| numerators[i]).sum();
            let den: f64 = indices.iter().map(|&i| denominators[i]).sum();
            *value = scale * num / den.max(1e-12);
        }
    }

    /// Fits targets (residuals) with variance-reduction splits.
    pub fn fit(
        features: &[Vec<T>],
        targets: &[f64],
        max_depth: usize,
        min_leaf: usize,
    ) -> Self {
        assert_eq!(features.len(), targets.len());
        assert!(!features.is_empty());
        let dim = features[0].len();
        let indices: Vec<usize> = (0..features.len()).collect();
        let root = build_reg_node(features, targets, &indices, dim, max_depth, min_leaf, 0);
        Self { root, dim }
    }
}

fn build_reg_node<T: Scalar>(
    features: &[Vec<T>],
    targets: &[f64],
    indices: &[usize],
    dim: usize,
    max_depth: usize,
    min_leaf: usize,
    depth: usize,
) -> RegNode<T> {
    let mean = indices.iter().map(|&i| targets[i]).sum::<f64>() / indices.len() as f64;
    if depth >= max_depth || indices.len() < 2 * min_leaf {
        return RegNode::Leaf { value: mean };
    }

    let total_sum: f64 = indices.iter().map(|&i| targets[i]).sum();
    let total_sq: f64 = indices.iter().map(|&i| targets[i] * targets[i]).sum();
    let n = indices.len() as f64;

    let mut best: Option<(usize, T, f64)> = None;
    let mut sorted = indices.to_vec();
    for feature in 0..dim {
        sorted.sort_by(|&a, &b| {
            features[a][feature]
                .partial_cmp(&features[b][feature])
                .expect("finite features")
        });
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for pos in 0..sorted.len() - 1 {
            let y = targets[sorted[pos]];
            left_sum += y;
            left_sq += y * y;
            let left_n = (pos + 1) as f64;
            let right_n = n - left_n;
            let a = features[sorted[pos]][feature];
            let b = features[sorted[pos + 1]][feature];
            if a == b || (pos + 1) < min_leaf || (sorted.len() - pos - 1) < min_leaf {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let sse = (left_sq - left_sum * left_sum / left_n)
                + (right_sq - right_sum * right_sum / right_n);
            let improves = match &best {
                None => true,
                Some((_, _, b_sse)) => sse < b_sse - 1e-12,
            };
            if improves {
                best = Some((feature, (a + b) / T::of(2.0), sse));
            }
        }
    }

    match best {
        None => RegNode::Leaf { value: mean },
        Some((feature, threshold, _)) => {
            let (l, r): (Vec<usize>, Vec<usize>) = indices
                .iter()
                .partition(|&&i| features[i][feature] <= threshold);
            RegNode::Split {
                feature,
                threshold,
                left: Box::new(build_reg_node(
                    features, targets, &l, dim, max_depth, min_leaf, depth + 1,
                )),
                right: Box::new(build_reg_node(
                    features, targets, &r, dim, max_depth, min_leaf, depth + 1,
                )),
            }
        }
    }
}
