//! Fully synchronous runs from symmetric starts: any deterministic rule keeps the symmetry.

use serde::{Deserialize, Serialize};

use super::{detect_collision, to_global};
use crate::algorithm::Decision;
use crate::circle_math::{DirectionTag, TurnAngle};
use crate::configuration::{Configuration, Snapshot};

/// Simple deterministic rules to drive the experiment with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetryRule {
    Stay,
    /// Move this far toward the snapshot-forward neighbour (capped at half the gap).
    ForwardStep {
        amount: TurnAngle,
    },
    /// Move to the midpoint between both neighbours.
    GapMidpoint,
}

impl SymmetryRule {
    pub fn decide(&self, s: &Snapshot) -> Decision {
        let fwd = &s.forward_gaps.gaps()[0];
        match self {
            SymmetryRule::Stay => Decision::Stay,
            SymmetryRule::ForwardStep { amount } => {
                let step = std::cmp::min(amount.clone(), fwd.half());
                Decision::MoveTo { destination: step, path_direction: DirectionTag::Forward }
            }
            SymmetryRule::GapMidpoint => {
                let back = &s.reverse_gaps.gaps()[0];
                if fwd == back {
                    return Decision::Stay;
                }
                let shift = (fwd - back).half();
                if shift.is_positive() {
                    Decision::MoveTo { destination: shift, path_direction: DirectionTag::Forward }
                } else {
                    Decision::MoveTo { destination: shift.wrap(), path_direction: DirectionTag::Reverse }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryTrajectory {
    pub initial_fold: usize,
    /// Fold after each round, starting with the initial configuration.
    pub folds: Vec<usize>,
    pub collided: bool,
}

impl SymmetryTrajectory {
    pub fn preserved(&self) -> bool {
        !self.collided && self.folds.iter().all(|&k| k >= self.initial_fold)
    }
}

/// FSYNC rounds with every robot given the same flip bit, so rotated robots see
/// rotated snapshots and decide rotated moves.
pub fn fsync_symmetry_experiment(c0: &Configuration, rule: &SymmetryRule, rounds: usize) -> SymmetryTrajectory {
    let mut c = c0.clone();
    let initial_fold = c.fold();
    let mut folds = vec![initial_fold];
    for _ in 0..rounds {
        let decisions: Vec<Decision> = (0..c.len())
            .map(|i| {
                let s = c.snapshot_of(i, false).expect("index in range");
                to_global(c.position(i), false, rule.decide(&s))
            })
            .collect();
        if detect_collision(c.positions(), &decisions).is_some() {
            return SymmetryTrajectory { initial_fold, folds, collided: true };
        }
        let next: Vec<TurnAngle> = c
            .positions()
            .iter()
            .zip(&decisions)
            .map(|(p, d)| match d {
                Decision::MoveTo { destination, .. } => destination.clone(),
                _ => p.clone(),
            })
            .collect();
        c = Configuration::new(next).expect("no collision");
        folds.push(c.fold());
    }
    SymmetryTrajectory { initial_fold, folds, collided: false }
}
