//! Leader election and the ready-to-form phase.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::finish::finishing_move;
use super::pattern::tail_formed;
use super::select::{forbidden_epsilons_bisector, select_in_interval, select_where};
use super::{AlgoError, Embedding, Mutation, Plan, PlannedMove, Rules, Step, TargetPattern};
use crate::circle_math::{angle_between, DirectionTag, TurnAngle};
use crate::configuration::{classify, ConfigClass, Configuration, LeaderFrame};

/// Depth of the dyadic fallback search when the first candidate is rejected.
pub(crate) const SEARCH_DEPTH: u32 = 6;

/// `c` with robot `i` relocated; `None` if that would stack two robots.
pub(crate) fn with_moved(c: &Configuration, i: usize, dest: &TurnAngle) -> Option<Configuration> {
    let mut pos = c.positions().to_vec();
    pos[i] = dest.wrap();
    Configuration::new(pos).ok().filter(|x| x.len() == c.len())
}

/// Does `post` still elect the robot at the same place with the same pivotal direction?
pub(crate) fn keeps_leader(c: &Configuration, frame: &LeaderFrame, post: &Configuration) -> bool {
    match classify(post) {
        Ok(ConfigClass::Leader { leader, pivotal }) => {
            post.position(leader) == c.position(frame.leader) && pivotal == frame.pivotal
        }
        _ => false,
    }
}

pub(crate) fn is_leader_config(c: &Configuration) -> bool {
    matches!(classify(c), Ok(ConfigClass::Leader { .. }))
}

/// Move `r_k` of the frame to pivotal offset `dest`.
pub(crate) fn move_to_offset(
    c: &Configuration,
    frame: &LeaderFrame,
    k: usize,
    dest: &TurnAngle,
    step: Step,
) -> PlannedMove {
    let direction = if dest > &frame.offsets[k] { frame.pivotal } else { frame.pivotal.opposite() };
    PlannedMove { robot: frame.order[k], destination: frame.absolute(c, dest), direction, step }
}

pub(crate) fn rfc_holds(frame: &LeaderFrame, beta0: &TurnAngle) -> bool {
    let a = &frame.alphas;
    a[0] < frame.min_alpha_from(1, beta0) && a[1] < frame.min_alpha_from(2, beta0)
}

fn leader_frame_of(c: &Configuration) -> Result<LeaderFrame, AlgoError> {
    match classify(c)? {
        ConfigClass::Leader { leader, pivotal } => Ok(LeaderFrame::new(c, leader, pivotal)),
        _ => Err(AlgoError::NotLeaderConfiguration),
    }
}

/// Both strict-minimum conditions on `α₀` and `α₁`.
pub fn is_rfc(c: &Configuration, pattern: &TargetPattern) -> Result<bool, AlgoError> {
    if c.len() != pattern.len() {
        return Err(AlgoError::SizeMismatch { robots: c.len(), pattern: pattern.len() });
    }
    Ok(rfc_holds(&leader_frame_of(c)?, pattern.beta(0)))
}

/// Every `r_i`, `i ≥ 3`, counted from the anchor along the embedding direction, sits on `T_i`.
pub fn is_pfc(c: &Configuration, emb: &Embedding) -> bool {
    let n = c.len();
    if emb.targets.len() != n {
        return false;
    }
    let Some(anchor) = c.index_of(&emb.anchor) else {
        return false;
    };
    (3..n).all(|k| {
        let i = match emb.direction {
            DirectionTag::Forward => (anchor + k) % n,
            DirectionTag::Reverse => (anchor + n - k) % n,
        };
        c.position(i) == &emb.targets[k]
    })
}

/// The Move-Ready robot of an RFC, as a presentation index.
pub fn move_ready(c: &Configuration, emb: &Embedding) -> Result<Option<usize>, AlgoError> {
    let n = c.len();
    if emb.targets.len() != n {
        return Err(AlgoError::SizeMismatch { robots: n, pattern: emb.targets.len() });
    }
    let frame = leader_frame_of(c)?;
    if c.position(frame.leader) != &emb.anchor || frame.pivotal != emb.direction {
        return Err(AlgoError::NotLeaderConfiguration);
    }
    let beta0 = angle_between(&emb.targets[0], &emb.targets[1], emb.direction);
    if !rfc_holds(&frame, &beta0) {
        return Err(AlgoError::NotReadyToForm);
    }
    let offsets: Vec<TurnAngle> = emb.targets.iter().map(|t| angle_between(&emb.anchor, t, emb.direction)).collect();
    Ok(move_ready_rank(&frame, &offsets).map(|k| frame.order[k]))
}

/// First rank `k ≥ 3` off target whose clearance toward its target side exceeds `α₁`.
pub(crate) fn move_ready_rank(frame: &LeaderFrame, targets: &[TurnAngle]) -> Option<usize> {
    let n = frame.len();
    let off = &frame.offsets;
    (3..n).find(|&k| {
        let t = &targets[k];
        if t == &off[k] {
            return false;
        }
        let clearance = if t > &off[k] {
            let next = if k + 1 == n { TurnAngle::one() } else { off[k + 1].clone() };
            next - t
        } else {
            t - &off[k - 1]
        };
        clearance > frame.alphas[1]
    })
}

/// The robot on the bisector of a tied pair closes in on a neighbour.
pub(crate) fn break_tie(c: &Configuration, d: usize) -> Result<PlannedMove, AlgoError> {
    let fwd = c.rooted_sequence(d, DirectionTag::Forward);
    let rev = c.rooted_sequence(d, DirectionTag::Reverse);
    let dir = match fwd.lex_compare(&rev)? {
        Ordering::Greater => DirectionTag::Reverse,
        _ => DirectionTag::Forward,
    };
    let mover = c.position(d);
    let q = c.neighbor(d, dir);
    let nb = c.position(q);
    let theta = angle_between(mover, nb, dir);
    let alpha0 = c.gaps().into_iter().min().expect("nonempty");
    let lo = if theta > alpha0 { &theta - &alpha0 } else { TurnAngle::zero() };
    let forbidden = forbidden_epsilons_bisector(c, mover, nb, dir);
    let eps = select_where(&lo, &theta, &forbidden, SEARCH_DEPTH, |e| {
        with_moved(c, d, &dir.advance(mover, e)).is_some_and(|p| is_leader_config(&p))
    })?
    .ok_or(AlgoError::NoAdmissibleValue)?;
    Ok(PlannedMove { robot: d, destination: dir.advance(mover, &eps), direction: dir, step: Step::BreakTie })
}

pub(crate) fn leader_plan(
    c: &Configuration,
    frame: &LeaderFrame,
    pattern: &TargetPattern,
    rules: Rules,
) -> Result<Plan, AlgoError> {
    let beta0 = pattern.beta(0);
    let a = &frame.alphas;
    let rfc = rfc_holds(frame, beta0);
    if tail_formed(frame, pattern) {
        if let Some(m) = finishing_move(c, frame, pattern, rfc) {
            return Ok(Plan::Move(m));
        }
        if rfc {
            return Ok(Plan::Idle);
        }
    }

    let m1 = frame.min_alpha_from(1, beta0);
    if a[0] >= m1 {
        return shrink_leader_gap(c, frame, &m1).map(Plan::Move);
    }
    let m2 = frame.min_alpha_from(2, beta0);
    if a[1] >= m2 {
        let hi = &a[1] - &a[0];
        let lo = match rules.mutation {
            Some(Mutation::DropSecondGapLowerBound) => TurnAngle::zero(),
            None => &a[1] - &m2,
        };
        let eps = select_in_interval(&lo, &hi, &BTreeSet::new())?.chosen;
        let dest = &frame.offsets[2] - &eps;
        return Ok(Plan::Move(move_to_offset(c, frame, 2, &dest, Step::ShrinkSecondGap)));
    }

    let targets: Vec<TurnAngle> = (0..frame.len()).map(|k| pattern.target_offset(k).clone()).collect();
    Ok(match move_ready_rank(frame, &targets) {
        Some(k) => Plan::Move(move_to_offset(c, frame, k, &targets[k], Step::MoveReady)),
        None => Plan::Idle,
    })
}

fn shrink_leader_gap(c: &Configuration, frame: &LeaderFrame, m1: &TurnAngle) -> Result<PlannedMove, AlgoError> {
    let a0 = &frame.alphas[0];
    let lo = a0 - m1;
    let mover = c.position(frame.leader);
    let nb = c.position(frame.order[1]);
    let dir = frame.pivotal;
    let forbidden = forbidden_epsilons_bisector(c, mover, nb, dir);
    let eps = select_where(&lo, a0, &forbidden, SEARCH_DEPTH, |e| {
        with_moved(c, frame.leader, &dir.advance(mover, e)).is_some_and(|p| is_leader_config(&p))
    })?
    .ok_or(AlgoError::NoAdmissibleValue)?;
    Ok(PlannedMove {
        robot: frame.leader,
        destination: dir.advance(mover, &eps),
        direction: dir,
        step: Step::ShrinkLeaderGap,
    })
}
