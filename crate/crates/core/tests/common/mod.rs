//! Brute-force reference implementations and instance builders shared by the
//! integration tests. Nothing here calls the library's own search routines.
#![allow(dead_code)]

use std::cmp::Ordering;

use apf_core::algorithm::{embed_targets, Embedding, TargetPattern};
use apf_core::configuration::Nominee;
use apf_core::{Configuration, Decision, DirectionTag, TurnAngle};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn t(n: i64, d: i64) -> TurnAngle {
    TurnAngle::new(n, d)
}

fn modulo_one(x: TurnAngle) -> TurnAngle {
    let mut x = x;
    while !x.is_positive() && !x.is_zero() {
        x = x + TurnAngle::one();
    }
    while x >= TurnAngle::one() {
        x = x - TurnAngle::one();
    }
    x
}

/// Gaps read from robot `i` of the sorted positions `p`, walking in direction `d`.
pub fn rooted(p: &[TurnAngle], i: usize, d: DirectionTag) -> Vec<TurnAngle> {
    let n = p.len();
    (0..n)
        .map(|k| match d {
            DirectionTag::Forward => {
                let a = &p[(i + k) % n];
                let b = &p[(i + k + 1) % n];
                if n == 1 {
                    TurnAngle::one()
                } else {
                    modulo_one(b.clone() - a)
                }
            }
            DirectionTag::Reverse => {
                let a = &p[(i + n - k % n) % n];
                let b = &p[(i + 2 * n - k - 1) % n];
                if n == 1 {
                    TurnAngle::one()
                } else {
                    modulo_one(a.clone() - b)
                }
            }
        })
        .collect()
}

/// Argmin over all `2n` rooted sequences.
pub fn brute_nominees(c: &Configuration) -> Vec<Nominee> {
    let p = c.positions();
    let all: Vec<(Vec<TurnAngle>, Nominee)> = (0..p.len())
        .flat_map(|i| {
            [DirectionTag::Forward, DirectionTag::Reverse]
                .into_iter()
                .map(move |d| (rooted(p, i, d), Nominee { index: i, direction: d }))
        })
        .collect();
    let best = all.iter().map(|(s, _)| s).min().unwrap().clone();
    let mut out: Vec<Nominee> = all.into_iter().filter(|(s, _)| *s == best).map(|(_, x)| x).collect();
    out.sort_by_key(|x| (x.index, x.direction));
    out
}

/// Least rotation and the smallest offset producing it.
pub fn brute_min_rotation(s: &[TurnAngle]) -> (Vec<TurnAngle>, usize) {
    let n = s.len();
    (0..n)
        .map(|k| ((0..n).map(|j| s[(k + j) % n].clone()).collect::<Vec<_>>(), k))
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
        .unwrap()
}

/// Largest `k` such that a `1/k` turn maps the point set onto itself.
pub fn brute_fold(p: &[TurnAngle]) -> usize {
    let n = p.len();
    (1..=n)
        .rev()
        .find(|&k| {
            let shift = TurnAngle::new(1, k as i64);
            let mut moved: Vec<TurnAngle> = p.iter().map(|x| modulo_one(x.clone() + &shift)).collect();
            moved.sort();
            let mut orig = p.to_vec();
            orig.sort();
            moved == orig
        })
        .unwrap()
}

fn arc(a: &TurnAngle, b: &TurnAngle, d: DirectionTag) -> TurnAngle {
    match d {
        DirectionTag::Forward => modulo_one(b.clone() - a),
        DirectionTag::Reverse => modulo_one(a.clone() - b),
    }
}

/// The Move-Ready robot, read straight off the definition on absolute positions:
/// walk from the leader along the embedding direction, skip the first two
/// neighbours and robots already on their target, and take the first robot whose
/// destination lies inside the arc to some neighbour with more than `α₁` to spare.
pub fn brute_move_ready(c: &Configuration, emb: &Embedding) -> Option<usize> {
    let n = c.len();
    let p = c.positions();
    let leader = p.iter().position(|x| *x == emb.anchor).unwrap();
    let walk = |k: usize| match emb.direction {
        DirectionTag::Forward => (leader + k) % n,
        DirectionTag::Reverse => (leader + n - k) % n,
    };
    let alpha1 = arc(&p[walk(1)], &p[walk(2)], emb.direction);
    (3..n).map(|k| (k, walk(k))).find_map(|(k, i)| {
        let r = &p[i];
        let dest = &emb.targets[k];
        if r == dest {
            return None;
        }
        let ok = [DirectionTag::Forward, DirectionTag::Reverse].into_iter().any(|d| {
            let nb = match d {
                DirectionTag::Forward => &p[(i + 1) % n],
                DirectionTag::Reverse => &p[(i + n - 1) % n],
            };
            arc(r, nb, d) - arc(r, dest, d) > alpha1
        });
        ok.then_some(i)
    })
}

/// Is there a time in `[0, 1]` at which some pair occupies the same point?
/// Each pair is checked by asking whether the unwrapped relative displacement
/// passes through a whole turn.
pub fn brute_collides(before: &[TurnAngle], decisions: &[Decision]) -> bool {
    let disp: Vec<TurnAngle> = before
        .iter()
        .zip(decisions)
        .map(|(p, d)| match d {
            Decision::MoveTo { destination, path_direction } => {
                let len = arc(p, destination, *path_direction);
                if *path_direction == DirectionTag::Forward {
                    len
                } else {
                    TurnAngle::zero() - len
                }
            }
            _ => TurnAngle::zero(),
        })
        .collect();
    for i in 0..before.len() {
        for j in 0..before.len() {
            if i == j {
                continue;
            }
            // relative position of j seen from i runs from g0 to g0 + rel, g0 in (0, 1)
            let g0 = arc(&before[i], &before[j], DirectionTag::Forward);
            let end = g0.clone() + &disp[j] - &disp[i];
            let (lo, hi) = if end < g0 { (end, g0) } else { (g0, end) };
            // any integer in [lo, hi]?
            let floor_hi = hi.ratio().floor();
            if *lo.ratio() <= floor_hi {
                return true;
            }
        }
    }
    false
}

/// Random distinct positions on the `1/q` grid.
pub fn random_positions(rng: &mut ChaCha8Rng, n: usize, q: i64) -> Vec<TurnAngle> {
    let mut picks = std::collections::BTreeSet::new();
    while picks.len() < n {
        picks.insert(rng.random_range(0..q));
    }
    picks.into_iter().map(|k| TurnAngle::new(k, q)).collect()
}

pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize, q: i64) -> TargetPattern {
    let mut cuts = std::collections::BTreeSet::new();
    while cuts.len() < n - 1 {
        cuts.insert(rng.random_range(1..q));
    }
    let mut pts: Vec<i64> = vec![0];
    pts.extend(cuts);
    pts.push(q);
    TargetPattern::from_gaps(pts.windows(2).map(|w| TurnAngle::new(w[1] - w[0], q)).collect()).unwrap()
}

/// An RFC with leader at a random point and random pivotal orientation; some
/// robots are dropped straight onto their targets when that keeps the RFC.
pub fn random_rfc(rng: &mut ChaCha8Rng, n: usize) -> (Configuration, TargetPattern, Embedding) {
    loop {
        let q = 16 * n as i64;
        let pattern = random_pattern(rng, n, q);
        let beta0 = pattern.beta(0).clone();
        let unit = TurnAngle::new(1, 64 * q);
        let a0 = unit.scale(rng.random_range(1..8), 1);
        let a1 = &a0 + &unit.scale(rng.random_range(1..8), 1);
        if a1 >= beta0 {
            continue;
        }
        // offsets along the pivotal direction
        let mut off = vec![TurnAngle::zero(), a0.clone(), &a0 + &a1];
        let rest = random_positions(rng, n - 3, q);
        let base = off[2].clone();
        for x in rest {
            let span = TurnAngle::one() - &base;
            let y = &base + &x.mul(&span);
            off.push(if rng.random_bool(0.3) { pattern.target_offset(off.len()).clone() } else { y });
        }
        let mut sorted = off[3..].to_vec();
        sorted.sort();
        off.truncate(3);
        off.extend(sorted);
        let mut ok = off.windows(2).all(|w| w[1] > w[0]) && off[n - 1] < TurnAngle::one();
        if ok {
            let mut gaps: Vec<TurnAngle> = off.windows(2).map(|w| w[1].clone() - &w[0]).collect();
            gaps.push(TurnAngle::one() - &off[n - 1]);
            ok = gaps[2..].iter().all(|g| *g > a1);
        }
        if !ok {
            continue;
        }
        let anchor = TurnAngle::new(rng.random_range(0..q), q);
        let dir = if rng.random_bool(0.5) { DirectionTag::Forward } else { DirectionTag::Reverse };
        let abs: Vec<TurnAngle> = off.iter().map(|o| dir.advance(&anchor, o)).collect();
        let c = Configuration::new(abs).unwrap();
        let leader = c.index_of(&anchor).unwrap();
        let Ok(emb) = embed_targets(&c, leader, dir, &pattern) else {
            panic!("built RFC is not a leader configuration with the intended frame");
        };
        return (c, pattern, emb);
    }
}

pub fn cmp_seq(a: &[TurnAngle], b: &[TurnAngle]) -> Ordering {
    a.cmp(b)
}

/// Even-size configuration mirrored about the axis through 0 with nobody on the
/// axis and no rotational symmetry: two nominees with tied arcs.
pub fn random_tied(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
    assert!(n.is_multiple_of(2) && n >= 4);
    loop {
        let q = 8 * n as i64;
        let mut picks = std::collections::BTreeSet::new();
        while picks.len() < n / 2 {
            picks.insert(rng.random_range(1..q));
        }
        // half-open upper half (0, 1/2) on the 1/(2q) grid
        let half: Vec<TurnAngle> = picks.into_iter().map(|k| TurnAngle::new(k, 2 * q)).collect();
        let mut pos = half.clone();
        pos.extend(half.iter().map(|x| (TurnAngle::zero() - x).wrap()));
        let c = Configuration::new(pos).unwrap();
        if c.fold() == 1 {
            return c;
        }
    }
}
