//! Choosing exact values inside open intervals while avoiding finitely many bad points.

use std::collections::{BTreeSet, VecDeque};

use super::AlgoError;
use crate::circle_math::{DirectionTag, TurnAngle};
use crate::configuration::Configuration;

/// A value picked from the open interval `(lo, hi)` outside `forbidden`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalChoice {
    pub lo: TurnAngle,
    pub hi: TurnAngle,
    pub forbidden: BTreeSet<TurnAngle>,
    pub chosen: TurnAngle,
}

/// Midpoint of `(lo, hi)`; if forbidden, descend into the left half and repeat.
///
/// Every step yields a fresh value, so at most `|forbidden| + 1` steps are taken.
pub fn select_in_interval(
    lo: &TurnAngle,
    hi: &TurnAngle,
    forbidden: &BTreeSet<TurnAngle>,
) -> Result<IntervalChoice, AlgoError> {
    if lo >= hi {
        return Err(AlgoError::EmptyInterval { lo: Box::new(lo.clone()), hi: Box::new(hi.clone()) });
    }
    let mut right = hi.clone();
    loop {
        let mid = TurnAngle::midpoint(lo, &right);
        if !forbidden.contains(&mid) {
            return Ok(IntervalChoice { lo: lo.clone(), hi: hi.clone(), forbidden: forbidden.clone(), chosen: mid });
        }
        right = mid;
    }
}

/// Dyadic points of `(lo, hi)` breadth first: midpoint, then quarter points, ...
/// down to `depth` levels (`2^depth - 1` values).
pub(crate) fn dyadic_points(lo: &TurnAngle, hi: &TurnAngle, depth: u32) -> impl Iterator<Item = TurnAngle> {
    let mut queue: VecDeque<(TurnAngle, TurnAngle, u32)> = VecDeque::new();
    if lo < hi && depth > 0 {
        queue.push_back((lo.clone(), hi.clone(), 1));
    }
    std::iter::from_fn(move || {
        let (a, b, d) = queue.pop_front()?;
        let mid = TurnAngle::midpoint(&a, &b);
        if d < depth {
            queue.push_back((a, mid.clone(), d + 1));
            queue.push_back((mid.clone(), b, d + 1));
        }
        Some(mid)
    })
}

/// First value of `(lo, hi)` satisfying `accept`: the left-descent choice
/// first, then dyadic points breadth first.
pub(crate) fn select_where(
    lo: &TurnAngle,
    hi: &TurnAngle,
    forbidden: &BTreeSet<TurnAngle>,
    depth: u32,
    mut accept: impl FnMut(&TurnAngle) -> bool,
) -> Result<Option<TurnAngle>, AlgoError> {
    let first = select_in_interval(lo, hi, forbidden)?.chosen;
    if accept(&first) {
        return Ok(Some(first));
    }
    Ok(dyadic_points(lo, hi, depth).find(|x| !forbidden.contains(x) && *x != first && accept(x)))
}

/// Move amounts at which some robot would sit on a bisector point of the mover
/// and the neighbour it approaches.
///
/// The mover at `m` travels `α` in `path` toward the neighbour at `q`. Robot `x`
/// lies on the bisector of the new chord iff `2x ≡ m ± α + q (mod 1)`, a single
/// solution `α ∈ [0, 1)` per robot.
pub fn forbidden_epsilons_bisector(
    c: &Configuration,
    mover: &TurnAngle,
    neighbor: &TurnAngle,
    path: DirectionTag,
) -> BTreeSet<TurnAngle> {
    c.positions()
        .iter()
        .filter(|x| *x != mover && *x != neighbor)
        .map(|x| {
            let rhs = x + x - mover - neighbor;
            match path {
                DirectionTag::Forward => rhs.wrap(),
                DirectionTag::Reverse => (-rhs).wrap(),
            }
        })
        .collect()
}
