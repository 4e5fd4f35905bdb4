//! Bounded exhaustive exploration of activation subsets and flip bits.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::checks::{check_transition, Violation, ViolationKind};
use super::{detect_collision, to_global, view_of, SimError, View};
use crate::algorithm::{compute_with, plan, Decision, Rules, TargetPattern};
use crate::circle_math::{DirectionTag, TurnAngle};
use crate::configuration::Configuration;

pub const MAX_EXPLORE_N: usize = 5;
pub const MAX_EXPLORE_BUDGET: usize = 6;
/// Refuse requests whose naive prefix count exceeds this.
pub const MAX_EXPLORE_PREFIXES: u128 = 1 << 40;

/// One round of a counterexample schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreStep {
    pub activated: Vec<usize>,
    pub flips: Vec<bool>,
    pub decisions: BTreeMap<usize, Decision>,
    pub positions_after: Vec<TurnAngle>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreReport {
    /// Schedule prefixes examined (transitions, before merging equal states).
    pub prefixes: u64,
    /// Distinct states reached.
    pub states: usize,
    pub counterexample: Option<(Vec<ExploreStep>, Violation)>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    positions: Vec<TurnAngle>,
    terminated: Vec<bool>,
    anchor: Option<(usize, DirectionTag)>,
}

struct Explorer<'a> {
    pattern: &'a TargetPattern,
    rules: Rules,
    /// Deepest remaining budget with which each state was already expanded.
    visited: HashMap<State, usize>,
    prefixes: u64,
    path: Vec<ExploreStep>,
}

/// Every nonempty activation set with every flip assignment, `round_budget` rounds deep.
pub fn explore_schedules(
    c0: &Configuration,
    pattern: &TargetPattern,
    round_budget: usize,
    rules: Rules,
) -> Result<ExploreReport, SimError> {
    let n = c0.len();
    let per_round = 3u128.pow(n as u32) - 1;
    let estimate = per_round.saturating_pow(round_budget as u32);
    if n > MAX_EXPLORE_N || round_budget > MAX_EXPLORE_BUDGET || estimate > MAX_EXPLORE_PREFIXES {
        return Err(SimError::BudgetTooLarge { estimate, max_n: MAX_EXPLORE_N, max_budget: MAX_EXPLORE_BUDGET });
    }
    let fold = c0.fold();
    if fold > 1 {
        return Err(SimError::Unsolvable { fold });
    }
    let mut ex = Explorer { pattern, rules, visited: HashMap::new(), prefixes: 0, path: Vec::new() };
    let start = State { positions: c0.positions().to_vec(), terminated: vec![false; n], anchor: None };
    let counterexample = ex.visit(start, round_budget);
    Ok(ExploreReport { prefixes: ex.prefixes, states: ex.visited.len(), counterexample })
}

impl Explorer<'_> {
    fn visit(&mut self, s: State, budget: usize) -> Option<(Vec<ExploreStep>, Violation)> {
        if budget == 0 || s.terminated.iter().all(|&t| t) {
            return None;
        }
        if self.visited.get(&s).is_some_and(|&b| b >= budget) {
            return None;
        }
        self.visited.insert(s.clone(), budget);
        let n = s.positions.len();
        let view = view_of(&s.positions);
        let plan = match plan(&view.config, self.pattern, self.rules) {
            Ok(p) => p,
            Err(e) => return Some(self.fail(ViolationKind::ComputeError, e.to_string())),
        };
        // decisions per (robot id, flip), computed lazily
        let mut table: HashMap<(usize, bool), Decision> = HashMap::new();
        for mask in 1u32..(1 << n) {
            let active: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            for flipmask in 0u32..(1 << active.len()) {
                let flips: Vec<bool> = (0..active.len()).map(|k| flipmask & (1 << k) != 0).collect();
                self.prefixes += 1;
                let mut decisions = BTreeMap::new();
                for (&id, &flip) in active.iter().zip(&flips) {
                    let d = match table.get(&(id, flip)) {
                        Some(d) => d.clone(),
                        None => match self.decide(&s, &view, id, flip) {
                            Ok(d) => {
                                table.insert((id, flip), d.clone());
                                d
                            }
                            Err(msg) => return Some(self.fail(ViolationKind::ComputeError, msg)),
                        },
                    };
                    decisions.insert(id, d);
                }
                let by_id: Vec<Decision> =
                    (0..n).map(|id| decisions.get(&id).cloned().unwrap_or(Decision::Stay)).collect();
                let mut next = s.clone();
                let mut moved = Vec::new();
                for (&id, d) in &decisions {
                    match d {
                        Decision::MoveTo { destination, .. } => {
                            next.positions[id] = destination.clone();
                            moved.push(id);
                        }
                        Decision::Terminate => next.terminated[id] = true,
                        Decision::Stay => {}
                    }
                }
                self.path.push(ExploreStep {
                    activated: active.clone(),
                    flips: flips.clone(),
                    decisions,
                    positions_after: next.positions.clone(),
                });
                if let Some(w) = detect_collision(&s.positions, &by_id) {
                    let msg = format!("robots {} and {} meet at t = {}", w.first, w.second, w.time);
                    return Some(self.fail(ViolationKind::Collision, msg));
                }
                let after = if moved.is_empty() { view.clone() } else { view_of(&next.positions) };
                let problems = check_transition(&view, &after, &plan, &moved, self.pattern, &mut next.anchor);
                if let Some((kind, msg)) = problems.into_iter().next() {
                    return Some(self.fail(kind, msg));
                }
                if let Some(found) = self.visit(next, budget - 1) {
                    return Some(found);
                }
                self.path.pop();
            }
        }
        None
    }

    fn decide(&self, s: &State, view: &View, id: usize, flip: bool) -> Result<Decision, String> {
        if s.terminated[id] {
            return Ok(Decision::Terminate);
        }
        let i = view.index_of_id(id);
        let snap = view.config.snapshot_of(i, flip).map_err(|e| e.to_string())?;
        // no random source: exploration covers the deterministic rule only
        let local = compute_with(&snap, self.pattern, self.rules, None).map_err(|e| e.to_string())?;
        Ok(to_global(view.config.position(i), flip, local))
    }

    fn fail(&self, kind: ViolationKind, detail: String) -> (Vec<ExploreStep>, Violation) {
        (self.path.clone(), Violation { round: self.path.len(), kind, detail })
    }
}
