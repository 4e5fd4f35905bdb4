//! Many seeded runs per (n, scheduler) cell, aggregated into a table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::gen_instance;
use crate::simulator::{run, ActivationPolicy, Mode, PolicyKind, RunOptions, ViolationKind};

pub const CSV_HEADER: &str = "n,scheduler,trials,formed,max_epochs,mean_epochs,bound,violations,collisions";

/// Scheduler family; parameters that depend on `n` are filled in per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    Fsync,
    Rr,
    Random,
    Lazy,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] =
        [SchedulerKind::Fsync, SchedulerKind::Rr, SchedulerKind::Random, SchedulerKind::Lazy];

    /// `fairness` defaults to `n`.
    pub fn policy(self, n: usize, p: f64, fairness: Option<usize>) -> PolicyKind {
        let fairness = fairness.unwrap_or(n);
        match self {
            SchedulerKind::Fsync => PolicyKind::FullSync,
            SchedulerKind::Rr => PolicyKind::RoundRobinSingleton,
            SchedulerKind::Random => PolicyKind::RandomSubset { p, fairness },
            SchedulerKind::Lazy => PolicyKind::LazyAdversary { fairness },
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulerKind::Fsync => "fsync",
            SchedulerKind::Rr => "rr",
            SchedulerKind::Random => "random",
            SchedulerKind::Lazy => "lazy",
        })
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fsync" => Ok(SchedulerKind::Fsync),
            "rr" => Ok(SchedulerKind::Rr),
            "random" => Ok(SchedulerKind::Random),
            "lazy" => Ok(SchedulerKind::Lazy),
            _ => Err(format!("unknown scheduler {s:?} (expected fsync, rr, random or lazy)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub ns: Vec<usize>,
    pub trials: usize,
    pub schedulers: Vec<SchedulerKind>,
    pub seed: u64,
    pub mode: Mode,
    /// Grid denominator for generated instances; `None` means `8n`.
    pub q: Option<u64>,
    pub p: f64,
    pub fairness: Option<usize>,
    pub max_epochs: Option<usize>,
}

impl BatchSpec {
    pub fn new(ns: Vec<usize>, trials: usize, seed: u64, mode: Mode) -> Self {
        BatchSpec {
            ns,
            trials,
            schedulers: SchedulerKind::ALL.to_vec(),
            seed,
            mode,
            q: None,
            p: 0.5,
            fairness: None,
            max_epochs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchCell {
    pub n: usize,
    pub scheduler: SchedulerKind,
    pub trials: usize,
    pub formed: usize,
    pub max_epochs: usize,
    pub mean_epochs: f64,
    pub bound: usize,
    /// Runs with at least one violation.
    pub violations: usize,
    pub collisions: usize,
    pub by_kind: BTreeMap<ViolationKind, usize>,
    /// First failing trial, as `(instance seed, policy seed, detail)`.
    pub first_failure: Option<(u64, u64, String)>,
    /// Set when the whole cell could not run, e.g. wrong parity for the mode.
    pub error: Option<String>,
}

impl BatchCell {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{},{},{}",
            self.n,
            self.scheduler,
            self.trials,
            self.formed,
            self.max_epochs,
            self.mean_epochs,
            self.bound,
            self.violations,
            self.collisions
        )
    }

    pub fn is_clean(&self) -> bool {
        self.error.is_none() && self.formed == self.trials && self.violations == 0 && self.collisions == 0
    }
}

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Instance seed for trial `trial` at size `n`; shared by every scheduler.
pub fn instance_seed(seed: u64, n: usize, trial: usize) -> u64 {
    mix(mix(seed, n as u64), trial as u64)
}

fn policy_seed(seed: u64, n: usize, sched: SchedulerKind, trial: usize) -> u64 {
    mix(instance_seed(seed, n, trial), 1 + sched as u64)
}

struct Trial {
    formed: bool,
    epochs: usize,
    collisions: usize,
    kinds: Vec<ViolationKind>,
    failure: Option<String>,
}

fn one_trial(spec: &BatchSpec, n: usize, sched: SchedulerKind, trial: usize) -> Trial {
    let iseed = instance_seed(spec.seed, n, trial);
    let q = spec.q.unwrap_or(8 * n as u64);
    let failed = |msg: String| Trial { formed: false, epochs: 0, collisions: 0, kinds: vec![], failure: Some(msg) };
    let (c0, pattern) = match gen_instance(n, iseed, q) {
        Ok(x) => x,
        Err(e) => return failed(e.to_string()),
    };
    let policy = ActivationPolicy::new(sched.policy(n, spec.p, spec.fairness), policy_seed(spec.seed, n, sched, trial));
    let mut options = RunOptions::new(policy, spec.mode);
    options.max_epochs = spec.max_epochs;
    match run(&c0, &pattern, options) {
        Ok((report, _)) => Trial {
            formed: report.formed,
            epochs: report.epochs,
            collisions: report.collisions,
            kinds: report.violations.iter().map(|v| v.kind).collect(),
            failure: report.violations.first().map(|v| format!("round {}: {:?}: {}", v.round, v.kind, v.detail)),
        },
        Err(e) => failed(e.to_string()),
    }
}

fn cell(spec: &BatchSpec, n: usize, sched: SchedulerKind) -> BatchCell {
    let bound = crate::simulator::epoch_bound(n, spec.mode);
    let mut out = BatchCell {
        n,
        scheduler: sched,
        trials: spec.trials,
        formed: 0,
        max_epochs: 0,
        mean_epochs: 0.0,
        bound,
        violations: 0,
        collisions: 0,
        by_kind: BTreeMap::new(),
        first_failure: None,
        error: None,
    };
    if !spec.mode.accepts(n) {
        out.error = Some(format!("mode {:?} does not accept n = {n}", spec.mode));
        out.violations = spec.trials;
        return out;
    }
    let trials: Vec<Trial> = (0..spec.trials).into_par_iter().map(|k| one_trial(spec, n, sched, k)).collect();
    let mut total = 0usize;
    for (k, t) in trials.into_iter().enumerate() {
        out.formed += t.formed as usize;
        out.max_epochs = out.max_epochs.max(t.epochs);
        total += t.epochs;
        out.collisions += t.collisions;
        for kind in &t.kinds {
            *out.by_kind.entry(*kind).or_default() += 1;
        }
        if let Some(msg) = t.failure {
            out.violations += 1;
            if out.first_failure.is_none() {
                out.first_failure = Some((instance_seed(spec.seed, n, k), policy_seed(spec.seed, n, sched, k), msg));
            }
        }
    }
    if spec.trials > 0 {
        out.mean_epochs = total as f64 / spec.trials as f64;
    }
    out
}

/// One cell per `(n, scheduler)`, in input order.
pub fn batch(spec: &BatchSpec) -> Vec<BatchCell> {
    if spec.trials == 0 {
        return Vec::new();
    }
    spec.ns.iter().flat_map(|&n| spec.schedulers.iter().map(move |&s| (n, s))).map(|(n, s)| cell(spec, n, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheduler_names_round_trip() {
        for s in SchedulerKind::ALL {
            assert_eq!(s.to_string().parse::<SchedulerKind>().unwrap(), s);
        }
        assert!("nope".parse::<SchedulerKind>().is_err());
    }

    #[test]
    fn zero_trials_is_empty() {
        let spec = BatchSpec::new(vec![3, 5], 0, 1, Mode::Deterministic);
        assert!(batch(&spec).is_empty());
    }

    #[test]
    fn wrong_parity_fails_per_cell() {
        let spec = BatchSpec::new(vec![4, 5], 2, 1, Mode::Deterministic);
        let cells = batch(&spec);
        assert_eq!(cells.len(), 8);
        assert!(cells[..4].iter().all(|c| c.error.is_some()));
        assert!(cells[4..].iter().all(|c| c.error.is_none()));
    }

    #[test]
    fn small_batch_is_clean() {
        let spec = BatchSpec::new(vec![3, 5], 5, 11, Mode::Deterministic);
        for c in batch(&spec) {
            assert!(c.is_clean(), "{c:?}");
            assert_eq!(c.csv_row().split(',').count(), CSV_HEADER.split(',').count());
        }
    }
}
