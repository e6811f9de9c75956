//! Tabular MDPs and value iteration, used as an independent oracle for the
//! DQN's correctness.

use super::trainer::{EnvStep, QEnv};
use crate::scalar::Scalar;

/// One deterministic transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: usize,
    pub reward: f64,
    pub terminal: bool,
}

/// Finite deterministic MDP with known transition and reward tables.
#[derive(Debug, Clone)]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    /// `transitions[state][action]`.
    transitions: Vec<Vec<Transition>>,
}

impl TabularMdp {
    pub fn new(n_states: usize, n_actions: usize, transitions: Vec<Vec<Transition>>) -> Self {
        assert_eq!(transitions.len(), n_states);
        for row in &transitions {
            assert_eq!(row.len(), n_actions);
            for t in row {
                assert!(t.next < n_states);
            }
        }
        Self {
            n_states,
            n_actions,
            transitions,
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn transition(&self, state: usize, action: usize) -> Transition {
        self.transitions[state][action]
    }

    /// Value iteration to the given residual tolerance; returns state values
    /// and the greedy policy (ties toward the lowest action index).
    pub fn value_iteration(&self, discount: f64, tolerance: f64) -> (Vec<f64>, Vec<usize>) {
        assert!((0.0..1.0).contains(&discount));
        let mut values = vec![0.0; self.n_states];
        loop {
            let mut residual: f64 = 0.0;
            let mut next_values = vec![0.0; self.n_states];
            for s in 0..self.n_states {
                let mut best = f64::NEG_INFINITY;
                for a in 0..self.n_actions {
                    let t = self.transitions[s][a];
                    let q = t.reward
                        + if t.terminal {
                            0.0
                        } else {
                            discount * values[t.next]
                        };
                    if q > best {
                        best = q;
                    }
                }
                next_values[s] = best;
                residual = residual.max((best - values[s]).abs());
            }
            values = next_values;
            if residual < tolerance {
                break;
            }
        }
        let policy = (0..self.n_states)
            .map(|s| {
                let mut best_a = 0;
                let mut best_q = f64::NEG_INFINITY;
                for a in 0..self.n_actions {
                    let t = self.transitions[s][a];
                    let q = t.reward
                        + if t.terminal {
                            0.0
                        } else {
                            discount * values[t.next]
                        };
                    if q > best_q {
                        best_q = q;
                        best_a = a;
                    }
                }
                best_a
            })
            .collect();
        (values, policy)
    }
}

/// Drives a [`TabularMdp`] through the [`QEnv`] interface with one-hot state
/// observations, so the DQN trainer can run on it unchanged.
#[derive(Debug, Clone)]
pub struct ToyMdpEnv {
    mdp: TabularMdp,
    state: usize,
    done: bool,
    max_steps: usize,
    steps: usize,
}

impl ToyMdpEnv {
    pub fn new(mdp: TabularMdp, max_steps: usize) -> Self {
        Self {
            mdp,
            state: 0,
            done: false,
            max_steps,
            steps: 0,
        }
    }

    pub fn mdp(&self) -> &TabularMdp {
        &self.mdp
    }

    fn one_hot<T: Scalar>(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.mdp.n_states()];
        v[self.state] = T::one();
        v
    }
}

impl<T: Scalar> QEnv<T> for ToyMdpEnv {
    fn obs_dim(&self) -> usize {
        self.mdp.n_states()
    }

    fn action_count(&self) -> usize {
        self.mdp.n_actions()
    }

    fn reset(&mut self, _seed: u64) -> Vec<T> {
        self.state = 0;
        self.done = false;
        self.steps = 0;
        self.one_hot()
    }

    fn step(&mut self, action: usize) -> EnvStep<T> {
        assert!(!self.done, "stepping a finished episode");
        let t = self.mdp.transition(self.state, action);
        self.state = t.next;
        self.steps += 1;
        self.done = t.terminal || self.steps >= self.max_steps;
        EnvStep {
            obs: self.one_hot(),
            reward: T::of(t.reward),
            cost: T::of(-t.reward),
            terminal: t.terminal,
        }
    }
}

/// The delayed-reward chain used by the verification suite: staying pays a
/// small immediate reward, advancing pays nothing until the terminal bonus.
/// Greedy-on-immediate is suboptimal at discount 0.9.
pub fn delayed_reward_chain() -> TabularMdp {
    let stay = |s: usize| Transition {
        next: s,
        reward: 0.2,
        terminal: false,
    };
    let advance = |s: usize| Transition {
        next: s,
        reward: 0.0,
        terminal: false,
    };
    TabularMdp::new(
        3,
        2,
        vec![
            vec![stay(0), advance(1)],
            vec![stay(1), advance(2)],
            vec![
                stay(2),
                Transition {
                    next: 2,
                    reward: 5.0,
                    terminal: true,
                },
            ],
        ],
    )
}
