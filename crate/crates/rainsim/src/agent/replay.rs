//! Multi-step transitions and the FIFO replay memory.

use std::collections::VecDeque;

use crate::env::Terminal;
use crate::rng::Rng;

/// A stored multi-step transition.
///
/// `return_n` is the discounted sum of the `steps` window rewards
/// (`Σ γ^i R_{i+1}`); `steps` is the window length, N1 for full windows and
/// shorter for the flush at an episode end. States are stored in the
/// network's normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NStepTransition {
    pub state: [f64; 2],
    pub action: usize,
    pub return_n: f64,
    pub next_state: [f64; 2],
    pub terminal: Terminal,
    pub steps: usize,
}

/// Discounted window return `Σ_{i=0}^{len-1} γ^i rewards[i]`.
pub fn n_step_return(rewards: &[f64], gamma: f64) -> f64 {
    let mut acc = 0.0;
    let mut factor = 1.0;
    for r in rewards {
        acc += factor * r;
        factor *= gamma;
    }
    acc
}

/// Ring buffer of transitions with strict FIFO eviction and uniform
/// sampling (with replacement).
#[derive(Debug)]
pub struct ReplayMemory {
    buf: VecDeque<NStepTransition>,
    capacity: usize,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayMemory { buf: VecDeque::with_capacity(capacity.min(1 << 20)), capacity }
    }

    pub fn push(&mut self, t: NStepTransition) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn sample(&self, rng: &mut Rng) -> &NStepTransition {
        &self.buf[rng.index(self.buf.len())]
    }

    #[cfg(test)]
    fn contains_return(&self, value: f64) -> bool {
        self.buf.iter().any(|t| t.return_n == value)
    }
}

/// Sliding window of the last up-to-N1 (state, action, reward) entries of
/// the running episode.
#[derive(Debug)]
pub struct SlidingWindow {
    entries: VecDeque<([f64; 2], usize, f64)>,
    n1: usize,
}

impl SlidingWindow {
    pub fn new(n1: usize) -> Self {
        assert!(n1 >= 1, "window length must be at least 1");
        SlidingWindow { entries: VecDeque::with_capacity(n1), n1 }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Push the newest step. When the window is full, the oldest entry
    /// matures into a transition bootstrapping from `successor`.
    pub fn push(
        &mut self,
        state: [f64; 2],
        action: usize,
        reward: f64,
        successor: [f64; 2],
        terminal: Terminal,
        gamma: f64,
    ) -> Option<NStepTransition> {
        self.entries.push_back((state, action, reward));
        if self.entries.len() < self.n1 {
            return None;
        }
        let rewards: Vec<f64> = self.entries.iter().map(|e| e.2).collect();
        let (s0, a0, _) = self.entries.pop_front().expect("window non-empty");
        Some(NStepTransition {
            state: s0,
            action: a0,
            return_n: n_step_return(&rewards, gamma),
            next_state: successor,
            terminal,
            steps: rewards.len(),
        })
    }

    /// Drain the pending entries at an episode end. Each gets its partial
    /// return, the final state as successor, and the episode's exit tag.
    pub fn flush(
        &mut self,
        successor: [f64; 2],
        terminal: Terminal,
        gamma: f64,
    ) -> Vec<NStepTransition> {
        let mut out = Vec::with_capacity(self.entries.len());
        while let Some((s0, a0, _)) = self.entries.front().copied() {
            let rewards: Vec<f64> = self.entries.iter().map(|e| e.2).collect();
            self.entries.pop_front();
            out.push(NStepTransition {
                state: s0,
                action: a0,
                return_n: n_step_return(&rewards, gamma),
                next_state: successor,
                terminal,
                steps: rewards.len(),
            });
        }
        out
    }
}
