//! Cyclic gap sequences and the set-level queries built on them.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{CircleError, TurnAngle};

/// Consecutive angular gaps read around the circle. Positive, summing to one turn.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GapSequence(Vec<TurnAngle>);

impl GapSequence {
    pub fn new(gaps: Vec<TurnAngle>) -> Result<Self, CircleError> {
        if gaps.is_empty() {
            return Err(CircleError::Empty);
        }
        if let Some(i) = gaps.iter().position(|g| !g.is_positive()) {
            return Err(CircleError::NonPositiveGap(i));
        }
        let total: TurnAngle = gaps.iter().sum();
        if total != TurnAngle::one() {
            return Err(CircleError::BadTotal(total));
        }
        Ok(GapSequence(gaps))
    }

    /// Caller guarantees the invariants (gaps read off a valid configuration).
    pub(crate) fn from_gaps_unchecked(gaps: Vec<TurnAngle>) -> Self {
        debug_assert!(!gaps.is_empty());
        GapSequence(gaps)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn gaps(&self) -> &[TurnAngle] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &TurnAngle {
        &self.0[i % self.0.len()]
    }

    /// The sequence read starting at index `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.0.len();
        let k = k % n;
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        GapSequence(v)
    }

    pub fn reversed(&self) -> Self {
        GapSequence(self.0.iter().rev().cloned().collect())
    }

    /// Lexicographic order with exact comparison. Sequences must have equal length.
    pub fn lex_compare(&self, other: &GapSequence) -> Result<Ordering, CircleError> {
        if self.len() != other.len() {
            return Err(CircleError::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(self.0.cmp(&other.0))
    }

    /// Least cyclic rotation and the offset it starts at (smallest offset on ties).
    pub fn min_rotation(&self) -> (GapSequence, usize) {
        let k = min_rotation_offset(&self.0);
        (self.rotated(k), k)
    }

    pub fn into_vec(self) -> Vec<TurnAngle> {
        self.0
    }
}

/// Compare the rotation of `s` starting at `i` with the one starting at `j`.
pub(crate) fn cmp_rotations(s: &[TurnAngle], i: usize, j: usize) -> Ordering {
    let n = s.len();
    for k in 0..n {
        match s[(i + k) % n].cmp(&s[(j + k) % n]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Offset of the least rotation; plain quadratic scan, ties go to the smaller offset.
pub(crate) fn min_rotation_offset(s: &[TurnAngle]) -> usize {
    let mut best = 0;
    for i in 1..s.len() {
        if cmp_rotations(s, i, best) == Ordering::Less {
            best = i;
        }
    }
    best
}

/// Largest `k` such that rotating every position by `1/k` maps the set onto itself.
pub fn rotational_fold(positions: &[TurnAngle]) -> usize {
    let n = positions.len();
    if n == 0 {
        return 1;
    }
    let set: BTreeSet<TurnAngle> = positions.iter().map(TurnAngle::wrap).collect();
    debug_assert_eq!(set.len(), n, "positions must be distinct");
    let mut best = 1;
    for k in 2..=n {
        if !n.is_multiple_of(k) {
            continue;
        }
        let step = TurnAngle::new(1, k as i64);
        if set.iter().all(|p| set.contains(&(p + &step).wrap())) {
            best = k;
        }
    }
    best
}

/// The two points where the perpendicular bisector of chord `ab` meets the circle.
pub fn bisector_points(a: &TurnAngle, b: &TurnAngle) -> Result<(TurnAngle, TurnAngle), CircleError> {
    let (a, b) = (a.wrap(), b.wrap());
    if a == b {
        return Err(CircleError::Degenerate);
    }
    let mid = TurnAngle::midpoint(&a, &b).wrap();
    let opposite = (&mid + TurnAngle::half_turn()).wrap();
    Ok((mid, opposite))
}
