//! Semi-synchronous round engine with adversarial activation and orientation,
//! rigid simultaneous motion, exact collision checks and epoch accounting.

mod checks;
mod collision;
mod explore;
mod policy;
mod symmetry;
mod trace;

pub use checks::{Violation, ViolationKind};
pub use collision::{detect_collision, CollisionWitness};
pub use explore::{explore_schedules, ExploreReport, ExploreStep, MAX_EXPLORE_PREFIXES};
pub use policy::{ActivationPolicy, PolicyKind};
pub use symmetry::{fsync_symmetry_experiment, SymmetryRule, SymmetryTrajectory};
pub use trace::{read_trace, write_trace, TraceError};

pub(crate) use checks::{check_transition as check_step, View};

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm::{compute_with, plan, AlgoError, Decision, Plan, Rules, TargetPattern};
use crate::circle_math::{angle_between, DirectionTag, TurnAngle};
use crate::configuration::{classify, ConfigClass, Configuration};
use checks::{check_transition, formed, PhaseTracker};
use policy::Scheduler;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimError {
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error("initial configuration is {fold}-fold rotationally symmetric: unsolvable")]
    Unsolvable { fold: usize },
    #[error("{mode:?} mode cannot run {n} robots")]
    ModeMismatch { mode: Mode, n: usize },
    #[error("exploration needs n <= {max_n} and a budget of at most {max_budget} rounds; about {estimate} prefixes requested")]
    BudgetTooLarge { estimate: u128, max_n: usize, max_budget: usize },
}

/// Deterministic rule for odd swarms, or the randomized tie break for even ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Deterministic,
    Randomized,
}

impl Mode {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Mode::Deterministic => n >= 3 && !n.is_multiple_of(2),
            Mode::Randomized => n >= 4 && n.is_multiple_of(2),
        }
    }
}

/// How the adversary orients each snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// A fresh coin per activation.
    PerActivation,
    /// Every robot always gets the same flip bit.
    Fixed(bool),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub policy: ActivationPolicy,
    pub orientation: Orientation,
    pub mode: Mode,
    /// Defaults to `n + 6`.
    pub max_epochs: Option<usize>,
    pub rules: Rules,
    pub record_trace: bool,
}

impl RunOptions {
    pub fn new(policy: ActivationPolicy, mode: Mode) -> Self {
        RunOptions {
            policy,
            orientation: Orientation::PerActivation,
            mode,
            max_epochs: None,
            rules: Rules::default(),
            record_trace: true,
        }
    }
}

/// One round of the run, as written to trace files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundRecord {
    pub round: usize,
    /// 1-based epoch the round belongs to.
    pub epoch: usize,
    pub activated: Vec<usize>,
    /// Global-frame decisions of the activated robots, by robot id.
    pub decisions: BTreeMap<usize, Decision>,
    pub positions_before: Vec<TurnAngle>,
    pub positions_after: Vec<TurnAngle>,
    pub class: ConfigClass,
}

/// Nominee draws of one tie-breaking round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieBreakDraw {
    pub round: usize,
    pub epsilons: Vec<TurnAngle>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub n: usize,
    pub formed: bool,
    /// Epoch in which the pattern first appeared.
    pub formation_epoch: Option<usize>,
    /// Epochs used: the epoch in which the last robot terminated, or all epochs run.
    pub epochs: usize,
    pub rounds: usize,
    pub collisions: usize,
    pub violations: Vec<Violation>,
    pub terminated: usize,
    /// The epoch bound the run is held to.
    pub bound: usize,
    pub tie_breaks: Vec<TieBreakDraw>,
}

impl RunReport {
    pub fn is_clean(&self) -> bool {
        self.formed && self.violations.is_empty() && self.collisions == 0
    }
}

/// Epoch budget the run is checked against.
pub fn epoch_bound(n: usize, mode: Mode) -> usize {
    match mode {
        Mode::Deterministic => n + 4,
        Mode::Randomized => n + 6,
    }
}

pub(crate) fn view_of(positions: &[TurnAngle]) -> View {
    let mut ids: Vec<usize> = (0..positions.len()).collect();
    ids.sort_by(|&a, &b| positions[a].cmp(&positions[b]));
    let config = Configuration::new(ids.iter().map(|&i| positions[i].clone()).collect()).expect("distinct positions");
    View { config, ids }
}

/// Global-frame version of a decision taken in the observer's frame.
pub(crate) fn to_global(pos: &TurnAngle, flip: bool, d: Decision) -> Decision {
    match d {
        Decision::MoveTo { destination, path_direction } => Decision::MoveTo {
            destination: if flip { (pos - &destination).wrap() } else { (pos + &destination).wrap() },
            path_direction: path_direction.flipped_if(flip),
        },
        other => other,
    }
}

/// Robot ids that the configuration-level rule would move now.
pub(crate) fn movers(v: &View, p: &Plan) -> Vec<usize> {
    match p {
        Plan::Move(m) => vec![v.id(m.robot)],
        Plan::RandomTieBreak { nominees } => {
            let mut ids: Vec<usize> = nominees.iter().map(|x| v.id(x.index)).collect();
            ids.dedup();
            ids
        }
        _ => Vec::new(),
    }
}

/// A single run in progress.
pub struct Simulation {
    pattern: TargetPattern,
    options: RunOptions,
    positions: Vec<TurnAngle>,
    terminated: Vec<bool>,
    scheduler: Scheduler,
    rng: ChaCha8Rng,
    view: View,
    plan: Plan,
    cache: HashMap<(usize, bool), Decision>,
    anchor: Option<(usize, DirectionTag)>,
    phases: PhaseTracker,
    seen: Vec<bool>,
    completed_epochs: usize,
    round: usize,
    report: RunReport,
    trace: Vec<RoundRecord>,
    halted: bool,
}

impl Simulation {
    pub fn new(c0: &Configuration, pattern: &TargetPattern, options: RunOptions) -> Result<Self, SimError> {
        let n = c0.len();
        if n != pattern.len() {
            return Err(AlgoError::SizeMismatch { robots: n, pattern: pattern.len() }.into());
        }
        let fold = c0.fold();
        if fold > 1 {
            return Err(SimError::Unsolvable { fold });
        }
        if !options.mode.accepts(n) {
            return Err(SimError::ModeMismatch { mode: options.mode, n });
        }
        let positions = c0.positions().to_vec();
        let view = view_of(&positions);
        let plan = plan(&view.config, pattern, options.rules)?;
        let bound = epoch_bound(n, options.mode);
        Ok(Simulation {
            pattern: pattern.clone(),
            scheduler: Scheduler::new(options.policy.kind, n),
            rng: ChaCha8Rng::seed_from_u64(options.policy.seed),
            phases: PhaseTracker::new(&view),
            view,
            plan,
            positions,
            terminated: vec![false; n],
            cache: HashMap::new(),
            anchor: None,
            seen: vec![false; n],
            completed_epochs: 0,
            round: 0,
            report: RunReport {
                n,
                formed: false,
                formation_epoch: None,
                epochs: 0,
                rounds: 0,
                collisions: 0,
                violations: Vec::new(),
                terminated: 0,
                bound,
                tie_breaks: Vec::new(),
            },
            trace: Vec::new(),
            halted: false,
            options,
        })
    }

    pub fn is_done(&self) -> bool {
        self.halted || self.terminated.iter().all(|&t| t)
    }

    pub fn positions(&self) -> &[TurnAngle] {
        &self.positions
    }

    fn violate(&mut self, kind: ViolationKind, detail: String) {
        self.report.violations.push(Violation { round: self.round, kind, detail });
    }

    fn decide(&mut self, id: usize, flip: bool) -> Result<Decision, AlgoError> {
        if self.terminated[id] {
            return Ok(Decision::Terminate);
        }
        let i = self.view.index_of_id(id);
        let random = matches!(self.plan, Plan::RandomTieBreak { .. });
        if !random {
            if let Some(d) = self.cache.get(&(i, flip)) {
                return Ok(d.clone());
            }
        }
        let snap = self.view.config.snapshot_of(i, flip).map_err(AlgoError::from)?;
        let local = compute_with(&snap, &self.pattern, self.options.rules, Some(&mut self.rng))?;
        let d = to_global(self.view.config.position(i), flip, local);
        if !random {
            self.cache.insert((i, flip), d.clone());
        }
        Ok(d)
    }

    /// Play one round: activate, look, compute against the same configuration, move.
    pub fn step(&mut self) -> Option<&RoundRecord> {
        if self.is_done() {
            return None;
        }
        self.round += 1;
        let n = self.positions.len();
        let movers = movers(&self.view, &self.plan);
        let mut activated = self.scheduler.next(&movers, &mut self.rng);
        activated.sort_unstable();

        let mut decisions = BTreeMap::new();
        for &id in &activated {
            let flip = match self.options.orientation {
                Orientation::PerActivation => self.rng.random_bool(0.5),
                Orientation::Fixed(b) => b,
            };
            match self.decide(id, flip) {
                Ok(d) => {
                    decisions.insert(id, d);
                }
                Err(e) => {
                    self.violate(ViolationKind::ComputeError, format!("robot {id}: {e}"));
                    self.halted = true;
                    return None;
                }
            }
        }

        let before = self.positions.clone();
        let by_id: Vec<Decision> = (0..n).map(|id| decisions.get(&id).cloned().unwrap_or(Decision::Stay)).collect();
        if let Some(w) = detect_collision(&before, &by_id) {
            self.report.collisions += 1;
            self.violate(
                ViolationKind::Collision,
                format!("robots {} and {} meet at t = {}", w.first, w.second, w.time),
            );
            self.halted = true;
            return None;
        }

        let mut moved = Vec::new();
        let mut draws = Vec::new();
        for (id, d) in &decisions {
            match d {
                Decision::MoveTo { destination, path_direction } => {
                    if matches!(self.plan, Plan::RandomTieBreak { .. }) {
                        draws.push(angle_between(&before[*id], destination, *path_direction));
                    }
                    self.positions[*id] = destination.clone();
                    moved.push(*id);
                }
                Decision::Terminate => self.terminated[*id] = true,
                Decision::Stay => {}
            }
        }
        if draws.len() > 1 {
            let mut sorted = draws.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() < draws.len() {
                self.violate(ViolationKind::TieDrawRepeated, format!("{draws:?}"));
            }
        }
        if !draws.is_empty() {
            self.report.tie_breaks.push(TieBreakDraw { round: self.round, epsilons: draws });
        }

        let epoch = self.completed_epochs + 1;
        let before_view = self.view.clone();
        if !moved.is_empty() {
            self.view = view_of(&self.positions);
            self.cache.clear();
        }
        for (kind, msg) in
            check_transition(&before_view, &self.view, &self.plan, &moved, &self.pattern, &mut self.anchor)
        {
            self.violate(kind, msg);
        }
        if !moved.is_empty() {
            match plan(&self.view.config, &self.pattern, self.options.rules) {
                Ok(p) => self.plan = p,
                Err(e) => {
                    self.violate(ViolationKind::ComputeError, e.to_string());
                    self.halted = true;
                }
            }
        }
        if !self.report.formed && formed(&self.view, &self.pattern) {
            self.report.formed = true;
            self.report.formation_epoch = Some(epoch);
        }

        for &id in &activated {
            self.seen[id] = true;
        }
        if self.seen.iter().all(|&s| s) {
            self.completed_epochs += 1;
            self.seen.iter_mut().for_each(|s| *s = false);
            let anchored = self.anchor.is_some();
            for (kind, msg) in self.phases.at_boundary(self.completed_epochs, &self.view, &self.pattern, anchored) {
                self.violate(kind, msg);
            }
        }
        if self.terminated.iter().all(|&t| t) {
            self.report.epochs = epoch;
        }

        let class = classify(&self.view.config).unwrap_or(ConfigClass::Symmetric { fold: 0 });
        let record = RoundRecord {
            round: self.round,
            epoch,
            activated,
            decisions,
            positions_before: before,
            positions_after: self.positions.clone(),
            class,
        };
        if self.options.record_trace {
            self.trace.push(record);
            self.trace.last()
        } else {
            self.trace.clear();
            self.trace.push(record);
            self.trace.last()
        }
    }

    /// Run to termination or until the epoch budget is spent.
    pub fn run_to_end(mut self) -> (RunReport, Vec<RoundRecord>) {
        let n = self.positions.len();
        let max_epochs = self.options.max_epochs.unwrap_or(n + 6);
        let window = self.options.policy.kind.window(n);
        let max_rounds = (max_epochs + 1) * window.max(n) + 1;
        while !self.is_done() && self.completed_epochs < max_epochs && self.round < max_rounds {
            self.step();
        }
        self.finish()
    }

    fn finish(mut self) -> (RunReport, Vec<RoundRecord>) {
        self.report.rounds = self.round;
        self.report.terminated = self.terminated.iter().filter(|&&t| t).count();
        let all_done = self.report.terminated == self.positions.len();
        if !all_done {
            self.report.epochs = self.completed_epochs + usize::from(self.seen.iter().any(|&s| s));
        }
        if !self.report.formed {
            self.violate(ViolationKind::NotFormed, format!("pattern not formed in {} epochs", self.report.epochs));
        } else if !all_done {
            self.violate(ViolationKind::TerminationLate, "not every robot terminated".into());
        } else if let Some(f) = self.report.formation_epoch {
            if self.report.epochs > f + 1 {
                self.violate(
                    ViolationKind::TerminationLate,
                    format!("formed in epoch {f}, done in {}", self.report.epochs),
                );
            }
        }
        if self.report.epochs > self.report.bound {
            self.violate(
                ViolationKind::BoundExceeded,
                format!("{} epochs > {}", self.report.epochs, self.report.bound),
            );
        }
        if !self.options.record_trace {
            self.trace.clear();
        }
        (self.report, self.trace)
    }
}

/// Simulate from `c0` until every robot terminates or the epoch budget runs out.
pub fn run(
    c0: &Configuration,
    pattern: &TargetPattern,
    options: RunOptions,
) -> Result<(RunReport, Vec<RoundRecord>), SimError> {
    Ok(Simulation::new(c0, pattern, options)?.run_to_end())
}
