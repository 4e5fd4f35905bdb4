//! Inline invariant checks evaluated while a run unfolds.

use serde::{Deserialize, Serialize};

use crate::algorithm::{completion_move, formed_unchecked, Plan, PlannedMove, Step, TargetPattern};
use crate::circle_math::{angle_between, bisector_points, DirectionTag};
use crate::configuration::{classify, nominees_unchecked, ConfigClass, Configuration, LeaderFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Collision,
    Classification,
    NomineeCount,
    ComputeError,
    UnexpectedMover,
    StepPostcondition,
    LeaderLate,
    RfcLate,
    PfcLate,
    NoProgress,
    LeaderChanged,
    TieNotBroken,
    TieDrawRepeated,
    TerminationLate,
    BoundExceeded,
    NotFormed,
    DecisionMismatch,
    TraceInconsistent,
    EpochMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub round: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Sorted configuration plus the robot id at each sorted index.
#[derive(Clone, Debug)]
pub(crate) struct View {
    pub config: Configuration,
    pub ids: Vec<usize>,
}

impl View {
    pub(crate) fn id(&self, i: usize) -> usize {
        self.ids[i]
    }

    pub(crate) fn index_of_id(&self, id: usize) -> usize {
        self.ids.iter().position(|&x| x == id).expect("robot id present")
    }

    /// Leader id and pivotal direction, if this is a leader configuration.
    pub(crate) fn leader(&self) -> Option<(usize, DirectionTag)> {
        match classify(&self.config) {
            Ok(ConfigClass::Leader { leader, pivotal }) => Some((self.id(leader), pivotal)),
            _ => None,
        }
    }

    pub(crate) fn frame(&self) -> Option<LeaderFrame> {
        match classify(&self.config) {
            Ok(ConfigClass::Leader { leader, pivotal }) => Some(LeaderFrame::new(&self.config, leader, pivotal)),
            _ => None,
        }
    }
}

pub(crate) fn formed(v: &View, pattern: &TargetPattern) -> bool {
    formed_unchecked(&v.config.gaps(), pattern)
}

pub(crate) fn rfc(frame: &LeaderFrame, pattern: &TargetPattern) -> bool {
    crate::algorithm::rfc_holds(frame, pattern.beta(0))
}

/// Robots `r_k`, `k ≥ 3`, sitting on their targets.
pub(crate) fn tail_on_target(frame: &LeaderFrame, pattern: &TargetPattern) -> usize {
    (3..frame.len()).filter(|&k| &frame.offsets[k] == pattern.target_offset(k)).count()
}

fn one_move_away(v: &View, pattern: &TargetPattern) -> bool {
    v.config.fold() == 1 && completion_move(&v.config, pattern).is_some()
}

/// Checks for one transition `before → after`. `anchor` is the leader fixed at the
/// first RFC, updated here.
pub(crate) fn check_transition(
    before: &View,
    after: &View,
    plan: &Plan,
    moved: &[usize],
    pattern: &TargetPattern,
    anchor: &mut Option<(usize, DirectionTag)>,
) -> Vec<(ViolationKind, String)> {
    let mut out = Vec::new();
    match plan {
        Plan::Move(m) => {
            let planned = before.id(m.robot);
            if moved.iter().any(|&x| x != planned) {
                out.push((ViolationKind::UnexpectedMover, format!("moved {moved:?}, planned {planned}")));
            } else if moved.contains(&planned) {
                if let Some(msg) = step_postcondition(before, after, m, pattern) {
                    out.push((ViolationKind::StepPostcondition, format!("{:?}: {msg}", m.step)));
                }
            }
        }
        Plan::RandomTieBreak { nominees } => {
            let ids: Vec<usize> = nominees.iter().map(|x| before.id(x.index)).collect();
            if moved.iter().any(|x| !ids.contains(x)) {
                out.push((ViolationKind::UnexpectedMover, format!("moved {moved:?}, nominees {ids:?}")));
            } else if !moved.is_empty() && after.leader().is_none() && !formed(after, pattern) {
                out.push((ViolationKind::TieNotBroken, "still no leader after nominee moves".into()));
            }
        }
        Plan::Idle | Plan::Terminate => {
            if !moved.is_empty() {
                out.push((ViolationKind::UnexpectedMover, format!("moved {moved:?} without a planned move")));
            }
        }
    }
    if formed(after, pattern) {
        return out;
    }
    match classify(&after.config) {
        Err(e) => out.push((ViolationKind::Classification, e.to_string())),
        Ok(ConfigClass::Symmetric { fold }) => {
            out.push((ViolationKind::Classification, format!("became {fold}-fold symmetric")))
        }
        Ok(class) => {
            let mut robots: Vec<usize> = nominees_unchecked(&after.config).into_iter().map(|x| x.index).collect();
            robots.dedup();
            if !(1..=2).contains(&robots.len()) {
                out.push((ViolationKind::NomineeCount, format!("{} nominees", robots.len())));
            }
            let now = match class {
                ConfigClass::Leader { leader, pivotal } => Some((after.id(leader), pivotal)),
                _ => None,
            };
            match (*anchor, now) {
                (Some(a), n) if n != Some(a) && !one_move_away(after, pattern) => {
                    out.push((ViolationKind::LeaderChanged, format!("leader {a:?} became {n:?}")));
                }
                (None, Some(_)) if after.frame().is_some_and(|f| rfc(&f, pattern)) => *anchor = now,
                _ => {}
            }
        }
    }
    out
}

fn step_postcondition(before: &View, after: &View, m: &PlannedMove, pattern: &TargetPattern) -> Option<String> {
    if formed(after, pattern) {
        return None;
    }
    let beta0 = pattern.beta(0);
    let mover = before.id(m.robot);
    let new_pos = after.config.position(after.index_of_id(mover));
    let same_leader = || before.leader().is_some() && after.leader() == before.leader();
    match m.step {
        Step::BreakTie => {
            // with equal readings either way the mirrored robot moves the other way
            let old = before.config.position(m.robot);
            let dir = [m.direction, m.direction.opposite()]
                .into_iter()
                .find(|&d| {
                    let nb = before.config.position(before.config.neighbor(m.robot, d));
                    angle_between(old, new_pos, d) < angle_between(old, nb, d)
                })
                .unwrap_or(m.direction);
            let nb = before.config.position(before.config.neighbor(m.robot, dir));
            let alpha0 = before.config.gaps().into_iter().min()?;
            let gap = angle_between(new_pos, nb, dir);
            if gap >= alpha0 {
                return Some(format!("new gap {gap} not below {alpha0}"));
            }
            let (p, r) = bisector_points(new_pos, nb).ok()?;
            if after.config.index_of(&p).is_some() || after.config.index_of(&r).is_some() {
                return Some("robot on the new bisector".into());
            }
            after.leader().is_none().then(|| "no leader after tie break".into())
        }
        Step::ShrinkLeaderGap => {
            let Some(f) = after.frame() else {
                return Some("no leader after leader move".into());
            };
            let m1 = f.min_alpha_from(1, beta0);
            (f.alphas[0] >= m1).then(|| format!("α₀ = {} not below {m1}", f.alphas[0]))
        }
        Step::ShrinkSecondGap => {
            if !same_leader() {
                return Some("leader changed".into());
            }
            let f = after.frame()?;
            let m2 = f.min_alpha_from(2, beta0);
            let ok = f.alphas[0] < f.alphas[1] && f.alphas[1] < m2;
            (!ok).then(|| format!("need {} < {} < {m2}", f.alphas[0], f.alphas[1]))
        }
        Step::MoveReady => {
            if !same_leader() {
                return Some("leader changed".into());
            }
            let f = after.frame()?;
            (!rfc(&f, pattern)).then(|| "no longer ready to form".into())
        }
        Step::ParkSecond | Step::FinishFirst | Step::FinishSecond | Step::AdjustFirst | Step::Complete => {
            (!same_leader() && !one_move_away(after, pattern)).then(|| "leader changed".into())
        }
    }
}

/// Epoch-boundary phase tracker for a single run.
#[derive(Clone, Debug, Default)]
pub(crate) struct PhaseTracker {
    pub start_non_leader: bool,
    rfc_boundary: Option<usize>,
    last_tail: usize,
}

impl PhaseTracker {
    pub(crate) fn new(start: &View) -> Self {
        PhaseTracker { start_non_leader: start.leader().is_none(), ..Default::default() }
    }

    /// `completed` epochs have just closed with configuration `v`.
    pub(crate) fn at_boundary(
        &mut self,
        completed: usize,
        v: &View,
        pattern: &TargetPattern,
        anchored: bool,
    ) -> Vec<(ViolationKind, String)> {
        let mut out = Vec::new();
        if formed(v, pattern) {
            return out;
        }
        let frame = v.frame();
        let near = one_move_away(v, pattern);
        if completed == 1 && self.start_non_leader && frame.is_none() && !near {
            out.push((ViolationKind::LeaderLate, "no leader after the first epoch".into()));
        }
        let ready = frame.as_ref().is_some_and(|f| rfc(f, pattern) || tail_on_target(f, pattern) + 3 == f.len());
        if completed == 3 && !ready && !near && !anchored {
            out.push((ViolationKind::RfcLate, "not ready to form after three epochs".into()));
        }
        if let Some(f) = frame.filter(|_| anchored && !near) {
            let n = f.len();
            let tail = tail_on_target(&f, pattern);
            match self.rfc_boundary {
                None => self.rfc_boundary = Some(completed),
                Some(start) if tail + 3 < n => {
                    if tail <= self.last_tail {
                        out.push((ViolationKind::NoProgress, format!("{tail} robots on target, no gain")));
                    }
                    if completed - start >= n - 3 {
                        out.push((ViolationKind::PfcLate, format!("{tail} of {} on target", n - 3)));
                    }
                }
                _ => {}
            }
            self.last_tail = tail;
        }
        out
    }
}
