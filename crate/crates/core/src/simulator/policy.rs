//! Activation schedulers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which robots the adversary wakes up each round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyKind {
    FullSync,
    RoundRobinSingleton,
    /// Each robot independently with probability `p`; anyone idle for `fairness - 1`
    /// rounds is forced.
    RandomSubset {
        p: f64,
        fairness: usize,
    },
    /// Wakes everybody except the robots about to move, until the fairness cap forces them.
    LazyAdversary {
        fairness: usize,
    },
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::FullSync => "fsync",
            PolicyKind::RoundRobinSingleton => "rr",
            PolicyKind::RandomSubset { .. } => "random",
            PolicyKind::LazyAdversary { .. } => "lazy",
        }
    }

    /// Longest stretch of rounds a robot can go unactivated.
    pub fn window(&self, n: usize) -> usize {
        match self {
            PolicyKind::FullSync => 1,
            PolicyKind::RoundRobinSingleton => n,
            PolicyKind::RandomSubset { fairness, .. } | PolicyKind::LazyAdversary { fairness } => (*fairness).max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationPolicy {
    pub kind: PolicyKind,
    pub seed: u64,
}

impl ActivationPolicy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        ActivationPolicy { kind, seed }
    }
}

/// Per-run scheduler state: rounds since each robot last acted.
#[derive(Clone, Debug)]
pub(crate) struct Scheduler {
    kind: PolicyKind,
    idle: Vec<usize>,
    round: usize,
}

impl Scheduler {
    pub(crate) fn new(kind: PolicyKind, n: usize) -> Self {
        Scheduler { kind, idle: vec![0; n], round: 0 }
    }

    /// Robot ids to activate; `movers` are the robots the rule would move now.
    pub(crate) fn next(&mut self, movers: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.idle.len();
        let cap = self.kind.window(n);
        let overdue = |idle: &[usize], i: usize| idle[i] + 1 >= cap;
        let mut set: Vec<usize> = match self.kind {
            PolicyKind::FullSync => (0..n).collect(),
            PolicyKind::RoundRobinSingleton => vec![self.round % n],
            PolicyKind::RandomSubset { p, .. } => {
                (0..n).filter(|&i| overdue(&self.idle, i) || rng.random_bool(p.clamp(0.0, 1.0))).collect()
            }
            PolicyKind::LazyAdversary { .. } => {
                (0..n).filter(|&i| !movers.contains(&i) || overdue(&self.idle, i)).collect()
            }
        };
        if set.is_empty() {
            set = match self.kind {
                PolicyKind::LazyAdversary { .. } => movers.to_vec(),
                _ => vec![rng.random_range(0..n)],
            };
        }
        for (i, idle) in self.idle.iter_mut().enumerate() {
            if set.contains(&i) {
                *idle = 0;
            } else {
                *idle += 1;
            }
        }
        self.round += 1;
        set
    }
}
