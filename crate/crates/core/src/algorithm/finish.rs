//! The endgame: placing `r_1` and `r_2` once every other robot is on target,
//! plus the shortcut for configurations one relocation away from the pattern.

use std::collections::BTreeSet;

use super::phases::{keeps_leader, move_to_offset, with_moved};
use super::select::{dyadic_points, select_in_interval};
use super::{formed_unchecked, PlannedMove, Step, TargetPattern};
use crate::circle_math::{angle_between, DirectionTag, TurnAngle};
use crate::configuration::{Configuration, LeaderFrame};

const PARK_DEPTH: u32 = 5;
const ADJUST_DEPTH: u32 = 4;

/// A single relocation that forms the pattern. When several exist, the
/// strictly shortest one; `None` if the shortest is not unique.
pub fn completion_move(c: &Configuration, pattern: &TargetPattern) -> Option<PlannedMove> {
    let n = c.len();
    if n != pattern.len() {
        return None;
    }
    let g = c.gaps();
    let q = pattern.betas().gaps();
    let mut found: Vec<PlannedMove> = Vec::new();
    for reverse in [false, true] {
        let h = |k: usize| if reverse { &g[n - 1 - k] } else { &g[k] };
        // robot at the start of reading gap k
        let robot = |k: usize| if reverse { (n - k % n) % n } else { k % n };
        let dir = if reverse { DirectionTag::Reverse } else { DirectionTag::Forward };
        for s in 0..n {
            let mut bad = Vec::with_capacity(3);
            for k in 0..n {
                if h(k) != &q[(s + k) % n] {
                    bad.push(k);
                    if bad.len() > 2 {
                        break;
                    }
                }
            }
            let j = match bad.as_slice() {
                [x, y] if *y == x + 1 => *y,
                [0, y] if *y == n - 1 => 0,
                _ => continue,
            };
            let prev = (j + n - 1) % n;
            let want = &q[(s + prev) % n];
            let destination = dir.advance(c.position(robot(prev)), want);
            let direction = if want > h(prev) { dir } else { dir.opposite() };
            let m = PlannedMove { robot: robot(j), destination, direction, step: Step::Complete };
            if !found.iter().any(|x| x.robot == m.robot && x.destination == m.destination) {
                found.push(m);
            }
        }
    }
    let dist = |m: &PlannedMove| angle_between(c.position(m.robot), &m.destination, m.direction);
    found.sort_by_key(|m| dist(m));
    match found.as_slice() {
        [only] => Some(only.clone()),
        [a, b, ..] if dist(a) < dist(b) => Some(a.clone()),
        _ => None,
    }
}

/// Either the configuration after the move keeps the leader, or it can be finished in one move.
fn acceptable(c: &Configuration, frame: &LeaderFrame, post: &Configuration, pattern: &TargetPattern) -> bool {
    formed_unchecked(&post.gaps(), pattern)
        || (post.fold() == 1 && (completion_move(post, pattern).is_some() || keeps_leader(c, frame, post)))
}

/// Offset strictly between the neighbours of `r_k` in the frame.
fn fits(frame: &LeaderFrame, k: usize, dest: &TurnAngle) -> bool {
    let next = if k + 1 == frame.len() { TurnAngle::one() } else { frame.offsets[k + 1].clone() };
    dest > &frame.offsets[k - 1] && dest < &next && dest != &frame.offsets[k]
}

fn try_move(
    c: &Configuration,
    frame: &LeaderFrame,
    pattern: &TargetPattern,
    k: usize,
    dest: &TurnAngle,
    step: Step,
) -> Option<(PlannedMove, Configuration)> {
    if !fits(frame, k, dest) {
        return None;
    }
    let m = move_to_offset(c, frame, k, dest, step);
    let post = with_moved(c, m.robot, &m.destination)?;
    acceptable(c, frame, &post, pattern).then_some((m, post))
}

/// Moves that need no RFC: one of `r_1`, `r_2` already on target, or `r_1`
/// far enough from `r_2` (`(R_1, R_2) > β_1`) to take `T_1`.
fn settled_finish(c: &Configuration, frame: &LeaderFrame, pattern: &TargetPattern) -> Option<PlannedMove> {
    let t1 = pattern.target_offset(1);
    let t2 = pattern.target_offset(2);
    let on1 = &frame.offsets[1] == t1;
    let on2 = &frame.offsets[2] == t2;
    if on1 && !on2 && fits(frame, 2, t2) {
        return Some(move_to_offset(c, frame, 2, t2, Step::FinishSecond));
    }
    if on2 && !on1 && fits(frame, 1, t1) {
        return Some(move_to_offset(c, frame, 1, t1, Step::FinishFirst));
    }
    if &frame.alphas[1] > pattern.beta(1) {
        return try_move(c, frame, pattern, 1, t1, Step::FinishFirst).map(|(m, _)| m);
    }
    None
}

/// Frame of `post` anchored at the same leader, if `post` keeps it.
fn kept_frame(c: &Configuration, frame: &LeaderFrame, post: &Configuration) -> Option<LeaderFrame> {
    if !keeps_leader(c, frame, post) {
        return None;
    }
    Some(LeaderFrame::new(post, post.index_of(c.position(frame.leader))?, frame.pivotal))
}

fn park_second(c: &Configuration, frame: &LeaderFrame, pattern: &TargetPattern) -> Option<PlannedMove> {
    let n = frame.len();
    let b0 = pattern.beta(0);
    let lo = std::cmp::max(&frame.offsets[1] + pattern.beta(1), b0.clone());
    let hi = pattern.offset_or_turn(3);
    if lo >= hi {
        return None;
    }
    let last = pattern.beta(n - 1);
    // α₀ + β_{n-1} - δ with δ the midpoint of (0, β_{n-1} - β₀ + α₀)
    let span = last - b0 + &frame.alphas[0];
    let mut candidates = Vec::new();
    if span.is_positive() {
        let delta = select_in_interval(&TurnAngle::zero(), &span, &BTreeSet::new()).ok()?.chosen;
        candidates.push(&frame.alphas[0] + last - delta);
    }
    candidates.extend(dyadic_points(&lo, &hi, PARK_DEPTH));
    candidates.into_iter().filter(|d| d > &lo && d < &hi).find_map(|d| {
        let (m, post) = try_move(c, frame, pattern, 2, &d, Step::ParkSecond)?;
        if completion_move(&post, pattern).is_some() {
            return Some(m);
        }
        let pf = kept_frame(c, frame, &post)?;
        settled_finish(&post, &pf, pattern).is_some().then_some(m)
    })
}

/// RFC moves with a formed tail: `r_2` or `r_1` straight to target, else `r_2` parks.
fn ready_finish(c: &Configuration, frame: &LeaderFrame, pattern: &TargetPattern) -> Option<PlannedMove> {
    if let Some((m, _)) = try_move(c, frame, pattern, 2, pattern.target_offset(2), Step::FinishSecond) {
        return Some(m);
    }
    if let Some((m, _)) = try_move(c, frame, pattern, 1, pattern.target_offset(1), Step::FinishFirst) {
        return Some(m);
    }
    park_second(c, frame, pattern)
}

/// Endgame move when `r_3 … r_{n-1}` are all on target.
pub(crate) fn finishing_move(
    c: &Configuration,
    frame: &LeaderFrame,
    pattern: &TargetPattern,
    rfc: bool,
) -> Option<PlannedMove> {
    if let Some(m) = settled_finish(c, frame, pattern) {
        return Some(m);
    }
    if !rfc {
        return None;
    }
    if let Some(m) = ready_finish(c, frame, pattern) {
        return Some(m);
    }
    // r_1 shifts within (0, R_2) to a spot from which one of the moves above works
    let beta0 = pattern.beta(0);
    dyadic_points(&TurnAngle::zero(), &frame.offsets[2], ADJUST_DEPTH).find_map(|d| {
        let (m, post) = try_move(c, frame, pattern, 1, &d, Step::AdjustFirst)?;
        let pf = kept_frame(c, frame, &post)?;
        let ok = settled_finish(&post, &pf, pattern).is_some()
            || (super::phases::rfc_holds(&pf, beta0) && ready_finish(&post, &pf, pattern).is_some());
        ok.then_some(m)
    })
}
