//! Experience replay ring buffer.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One stored transition. Observations are kept in the environment's
/// physical units; normalization happens where the network consumes them.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience<T> {
    pub state: Vec<T>,
    pub action: usize,
    pub reward: T,
    pub next_state: Vec<T>,
    pub terminal: bool,
}

/// Fixed-capacity ring: once full, each push overwrites the oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    entries: Vec<Experience<T>>,
    next: usize,
}

impl<T: Clone> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity),
            next: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, experience: Experience<T>) {
        if self.entries.len() < self.capacity {
            self.entries.push(experience);
        } else {
            self.entries[self.next] = experience;
            self.next = (self.next + 1) % self.capacity;
        }
    }

    /// Uniform sample with replacement.
    pub fn sample<'a>(&'a self, batch: usize, rng: &mut ChaCha8Rng) -> Vec<&'a Experience<T>> {
        assert!(!self.entries.is_empty(), "cannot sample an empty buffer");
        (0..batch)
            .map(|_| &self.entries[rng.random_range(0..self.entries.len())])
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Experience<T>> {
        self.entries.iter()
    }
}
