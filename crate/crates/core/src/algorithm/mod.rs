//! The formation rule: a pure function from a robot's snapshot and the target
//! pattern to a decision.
//!
//! Internally every configuration has at most one deterministic mover, so the
//! rule is phrased as a [`Plan`] for the whole configuration, computed in the
//! observer's own frame; the observer then reads off its own entry. The only
//! exception is the randomized tie break for even swarms, where both nominees
//! move.

mod finish;
mod pattern;
mod phases;
mod randomized;
mod select;

pub use finish::completion_move;
pub use pattern::{embed_targets, pattern_formed, Embedding, PatternFile, TargetPattern};
pub use phases::{is_pfc, is_rfc, move_ready};
pub use randomized::{randomized_nominee_move, TIE_BREAK_MODULUS_RANGE};
pub use select::{forbidden_epsilons_bisector, select_in_interval, IntervalChoice};

pub(crate) use pattern::formed_unchecked;
pub(crate) use phases::rfc_holds;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle_math::{CircleError, DirectionTag, TurnAngle};
use crate::configuration::{
    classify_asymmetric, ConfigClass, ConfigError, Configuration, LeaderFrame, Nominee, Snapshot,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgoError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{robots} robots but the pattern has {pattern} gaps")]
    SizeMismatch { robots: usize, pattern: usize },
    #[error("at least 3 robots are required, got {0}")]
    TooFewRobots(usize),
    #[error(
        "configuration is {fold}-fold rotationally symmetric; no deterministic algorithm can form an arbitrary pattern"
    )]
    Unsolvable { fold: usize },
    #[error("configuration has no leader")]
    NotLeaderConfiguration,
    #[error("configuration is not ready to form")]
    NotReadyToForm,
    #[error("open interval ({lo}, {hi}) is empty")]
    EmptyInterval { lo: Box<TurnAngle>, hi: Box<TurnAngle> },
    #[error("tied double-nominee configuration with an odd number of robots has {0} robots on the bisector")]
    BisectorOccupancy(usize),
    #[error("observer must be a nominee of an even, tied double-nominee configuration")]
    NotTiedNominee,
    #[error("the randomized tie break needs a random source")]
    RandomnessRequired,
    #[error("no admissible value found in the search interval")]
    NoAdmissibleValue,
}

/// What an activated robot does, in the frame it was computed in.
///
/// From [`compute`] the frame is the observer's own: the observer sits at `0`
/// and positive angles run in its snapshot's forward direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decision {
    Stay,
    MoveTo { destination: TurnAngle, path_direction: DirectionTag },
    Terminate,
}

impl Decision {
    pub fn is_move(&self) -> bool {
        matches!(self, Decision::MoveTo { .. })
    }
}

/// Which rule produced a planned move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// The robot on the bisector of a tied double-nominee configuration steps off.
    BreakTie,
    /// Leader approaches `r_1` so that `α₀` becomes the strict minimum, below `β₀`.
    ShrinkLeaderGap,
    /// `r_2` approaches `r_1` so that `α₁` becomes the strict runner-up, below `β₀`.
    ShrinkSecondGap,
    /// The move-ready robot goes to its target.
    MoveReady,
    /// `r_2` parks at an intermediate point so that `r_1` can reach `T_1` safely.
    ParkSecond,
    /// `r_1` adjusts its gap before the final two moves.
    AdjustFirst,
    /// `r_1` moves to `T_1`.
    FinishFirst,
    /// `r_2` moves to `T_2`.
    FinishSecond,
    /// A single relocation completes the pattern.
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlannedMove {
    pub robot: usize,
    pub destination: TurnAngle,
    pub direction: DirectionTag,
    pub step: Step,
}

/// The rule's verdict for a whole configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    Terminate,
    Idle,
    Move(PlannedMove),
    RandomTieBreak { nominees: Vec<Nominee> },
}

/// Deliberately broken variants of the rule, for checking the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Pick the `r_2` step from `(0, α₁ - α₀)` instead of the lower-bounded interval.
    DropSecondGapLowerBound,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rules {
    pub mutation: Option<Mutation>,
}

/// Decide what the observer of `s` does. Deterministic for fixed inputs.
///
/// `rng` is only consulted for the randomized tie break of even swarms.
pub fn compute(s: &Snapshot, pattern: &TargetPattern, rng: Option<&mut dyn RngCore>) -> Result<Decision, AlgoError> {
    compute_with(s, pattern, Rules::default(), rng)
}

pub fn compute_with(
    s: &Snapshot,
    pattern: &TargetPattern,
    rules: Rules,
    rng: Option<&mut dyn RngCore>,
) -> Result<Decision, AlgoError> {
    let local = s.local_configuration();
    match plan(&local, pattern, rules)? {
        Plan::Terminate => Ok(Decision::Terminate),
        Plan::Idle => Ok(Decision::Stay),
        Plan::Move(m) if m.robot == 0 => {
            Ok(Decision::MoveTo { destination: m.destination, path_direction: m.direction })
        }
        Plan::Move(_) => Ok(Decision::Stay),
        Plan::RandomTieBreak { nominees } => {
            if nominees.iter().any(|x| x.index == 0) {
                let rng = rng.ok_or(AlgoError::RandomnessRequired)?;
                Ok(randomized::tie_break_move(&local, rng)?.0)
            } else {
                Ok(Decision::Stay)
            }
        }
    }
}

/// The rule applied to a whole configuration, in that configuration's frame.
pub fn plan(c: &Configuration, pattern: &TargetPattern, rules: Rules) -> Result<Plan, AlgoError> {
    let n = c.len();
    if n != pattern.len() {
        return Err(AlgoError::SizeMismatch { robots: n, pattern: pattern.len() });
    }
    if n < 3 {
        return Err(AlgoError::TooFewRobots(n));
    }
    if formed_unchecked(&c.gaps(), pattern) {
        return Ok(Plan::Terminate);
    }
    let fold = c.fold();
    if fold > 1 {
        return Err(AlgoError::Unsolvable { fold });
    }
    if let Some(m) = completion_move(c, pattern) {
        return Ok(Plan::Move(m));
    }
    match classify_asymmetric(c)? {
        ConfigClass::Symmetric { fold } => Err(AlgoError::Unsolvable { fold }),
        ConfigClass::DoubleNomineeTied { nominees, on_bisector } => {
            if n % 2 == 1 {
                match on_bisector.as_slice() {
                    [d] => phases::break_tie(c, *d).map(Plan::Move),
                    other => Err(AlgoError::BisectorOccupancy(other.len())),
                }
            } else {
                let noms = crate::configuration::nominees_unchecked(c)
                    .into_iter()
                    .filter(|x| nominees.contains(&x.index))
                    .collect();
                Ok(Plan::RandomTieBreak { nominees: noms })
            }
        }
        ConfigClass::Leader { leader, pivotal } => {
            let frame = LeaderFrame::new(c, leader, pivotal);
            phases::leader_plan(c, &frame, pattern, rules)
        }
    }
}
