//! Exact collision detection for one round of rigid, simultaneous motion.

use serde::{Deserialize, Serialize};

use crate::algorithm::Decision;
use crate::circle_math::{angle_between, DirectionTag, TurnAngle};

/// Two robots at the same point at time `t ∈ (0, 1]` of the round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionWitness {
    pub first: usize,
    pub second: usize,
    pub time: TurnAngle,
}

/// Signed displacement of one robot over the round.
fn velocity(pos: &TurnAngle, d: &Decision) -> TurnAngle {
    match d {
        Decision::MoveTo { destination, path_direction } => {
            let len = angle_between(pos, destination, *path_direction);
            match path_direction {
                DirectionTag::Forward => len,
                DirectionTag::Reverse => -len,
            }
        }
        _ => TurnAngle::zero(),
    }
}

/// Earliest time two robots meet when each travels its chosen arc at constant speed.
///
/// `before[i]` is robot `i`'s start and `decisions[i]` its (global-frame) decision;
/// positions are assumed distinct at `t = 0`.
pub fn detect_collision(before: &[TurnAngle], decisions: &[Decision]) -> Option<CollisionWitness> {
    let v: Vec<TurnAngle> = before.iter().zip(decisions).map(|(p, d)| velocity(p, d)).collect();
    let mut best: Option<CollisionWitness> = None;
    for i in 0..before.len() {
        for j in i + 1..before.len() {
            let w = &v[i] - &v[j];
            if w.is_zero() {
                continue;
            }
            // p_i - p_j + w t ≡ 0 (mod 1) with gap Δ = p_i - p_j in (0, 1)
            let delta = (&before[i] - &before[j]).wrap();
            let t = if w.is_positive() {
                let need = TurnAngle::one() - &delta;
                if need > w {
                    continue;
                }
                TurnAngle::from_ratio(need.ratio() / w.ratio())
            } else {
                let speed = -w;
                if delta > speed {
                    continue;
                }
                TurnAngle::from_ratio(delta.ratio() / speed.ratio())
            };
            if best.as_ref().is_none_or(|b| t < b.time) {
                best = Some(CollisionWitness { first: i, second: j, time: t });
            }
        }
    }
    best
}
