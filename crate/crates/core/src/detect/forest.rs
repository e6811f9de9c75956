//! Bagged random forest over Gini trees.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::LabeledSample;
use super::tree::{DecisionTreeModel, TreeParams};
use super::DetectError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestParams {
    pub trees: usize,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    /// 100 bootstrapped trees grown deep (depth 25, single-sample leaves),
    /// the usual forest regime.
    fn default() -> Self {
        Self {
            trees: 100,
            tree: TreeParams {
                max_depth: 25,
                min_leaf: 1,
            },
        }
    }
}

/// Bootstrap-sampled trees with sqrt(d) feature subsampling per split;
/// prediction is the majority vote with lowest-label tie-breaking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel<T> {
    pub(crate) trees: Vec<DecisionTreeModel<T>>,
    pub(crate) dim: usize,
    pub(crate) n_classes: usize,
}

impl<T: Scalar> RandomForestModel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fit(
        samples: &[&LabeledSample<T>],
        dim: usize,
        n_classes: usize,
        params: &ForestParams,
        seed: u64,
    ) -> Result<Self, DetectError> {
        if samples.is_empty() {
            return Err(DetectError::EmptyTrainingSet);
        }
        let features_per_split = (dim as f64).sqrt().ceil() as usize;
        // Per-tree seeds are drawn up front so trees could be fit in any
        // order (or concurrently) with identical results.
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let tree_seeds: Vec<u64> = (0..params.trees).map(|_| master.next_u64()).collect();

        let trees = tree_seeds
            .into_iter()
            .map(|tree_seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
                let bootstrap: Vec<&LabeledSample<T>> = (0..samples.len())
                    .map(|_| samples[rng.random_range(0..samples.len())])
                    .collect();
                DecisionTreeModel::fit(
                    &bootstrap,
                    dim,
                    n_classes,
                    &params.tree,
                    Some(features_per_split),
                    &mut rng,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            trees,
            dim,
            n_classes,
        })
    }

    pub fn predict(&self, features: &[T]) -> Result<usize, DetectError> {
        if features.len() != self.dim {
            return Err(DetectError::DimensionMismatch {
                expected: self.dim,
                got: features.len(),
            });
        }
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            votes[tree.predict(features)?] += 1;
        }
        let mut best = 0;
        for c in 1..self.n_classes {
            if votes[c] > votes[best] {
                best = c;
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::tree::Node;

    #[test]
    fn forest_of_identical_trees_matches_a_single_tree() {
        let stump = DecisionTreeModel {
            root: Node::Split {
                feature: 0,
                threshold: 0.5,
                left: Box::new(Node::Leaf { label: 0 }),
                right: Box::new(Node::Leaf { label: 1 }),
            },
            dim: 2,
            n_classes: 2,
        };
        let forest = RandomForestModel {
            trees: vec![stump.clone(), stump.clone(), stump.clone()],
            dim: 2,
            n_classes: 2,
        };
        for x in [[0.0, 9.0], [0.4, -1.0], [0.6, 2.0], [5.0, 5.0]] {
            assert_eq!(
                forest.predict(&x).unwrap(),
                stump.predict(&x).unwrap()
            );
        }
    }

    #[test]
    fn tie_votes_resolve_to_the_lowest_label() {
        let leaf = |label| DecisionTreeModel::<f64> {
            root: Node::Leaf { label },
            dim: 1,
            n_classes: 3,
        };
        let forest = RandomForestModel {
            trees: vec![leaf(2), leaf(1), leaf(1), leaf(2)],
            dim: 1,
            n_classes: 3,
        };
        assert_eq!(forest.predict(&[0.0]).unwrap(), 1);
    }

    #[test]
    fn fit_is_deterministic_per_seed() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<LabeledSample<f64>> = (0..150)
            .map(|_| {
                let x: f64 = rng.random_range(-1.0..1.0);
                LabeledSample {
                    features: vec![x, rng.random_range(-1.0..1.0)],
                    label: usize::from(x > 0.0),
                }
            })
            .collect();
        let refs: Vec<&LabeledSample<f64>> = samples.iter().collect();
        let params = ForestParams {
            trees: 11,
            tree: TreeParams {
                max_depth: 6,
                min_leaf: 2,
            },
        };
        let f1 = RandomForestModel::fit(&refs, 2, 2, &params, 77).unwrap();
        let f2 = RandomForestModel::fit(&refs, 2, 2, &params, 77).unwrap();
        assert_eq!(f1, f2);
    }
}
