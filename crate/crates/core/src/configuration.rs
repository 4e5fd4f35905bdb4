//! Robot configurations on the circle and their classification: rooted angle
//! sequences, nominees, bisector arcs, leader and pivotal direction.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle_math::{
    angle_between, bisector_points, cmp_rotations, min_rotation_offset, rotational_fold, CircleError, DirectionTag,
    GapSequence, TurnAngle,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("configuration has no robots")]
    Empty,
    #[error("two robots share position {0}")]
    Duplicate(TurnAngle),
    #[error("robot index {index} out of range for {n} robots")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("configuration is rotationally symmetric ({0}-fold)")]
    Symmetric(usize),
    #[error("classification needs at least 3 robots, got {0}")]
    TooFew(usize),
    #[error("robot {0} has equal sequences in both directions; pivotal direction undefined")]
    AmbiguousPivotal(usize),
    #[error("robot {0} is not the leader of this configuration")]
    NotLeader(usize),
}

/// Distinct robot positions, sorted ascending in the presentation frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ConfigurationFile", into = "ConfigurationFile")]
pub struct Configuration {
    positions: Vec<TurnAngle>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    pub positions: Vec<TurnAngle>,
}

impl TryFrom<ConfigurationFile> for Configuration {
    type Error = ConfigError;
    fn try_from(f: ConfigurationFile) -> Result<Self, ConfigError> {
        Configuration::new(f.positions)
    }
}

impl From<Configuration> for ConfigurationFile {
    fn from(c: Configuration) -> Self {
        ConfigurationFile { positions: c.positions }
    }
}

impl Configuration {
    /// Positions are wrapped into `[0, 1)` and sorted; input order is irrelevant.
    pub fn new(positions: Vec<TurnAngle>) -> Result<Self, ConfigError> {
        if positions.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut positions: Vec<TurnAngle> = positions.iter().map(TurnAngle::wrap).collect();
        positions.sort();
        if let Some(w) = positions.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::Duplicate(w[0].clone()));
        }
        Ok(Configuration { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[TurnAngle] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> &TurnAngle {
        &self.positions[i % self.positions.len()]
    }

    pub fn index_of(&self, p: &TurnAngle) -> Option<usize> {
        self.positions.binary_search(p).ok()
    }

    /// Forward gaps: `gaps[i]` runs from robot `i` to robot `i + 1`.
    pub fn gaps(&self) -> Vec<TurnAngle> {
        let n = self.positions.len();
        if n == 1 {
            return vec![TurnAngle::one()];
        }
        (0..n).map(|i| angle_between(&self.positions[i], &self.positions[(i + 1) % n], DirectionTag::Forward)).collect()
    }

    pub fn gap_sequence(&self) -> GapSequence {
        GapSequence::from_gaps_unchecked(self.gaps())
    }

    /// Rotate every position by `c` turns.
    pub fn rotated_by(&self, c: &TurnAngle) -> Configuration {
        Configuration::new(self.positions.iter().map(|p| p + c).collect()).expect("rotation keeps positions distinct")
    }

    /// Reflect through the axis at position 0.
    pub fn mirrored(&self) -> Configuration {
        Configuration::new(self.positions.iter().map(|p| -p).collect()).expect("reflection keeps positions distinct")
    }

    pub fn fold(&self) -> usize {
        rotational_fold(&self.positions)
    }

    pub fn neighbor(&self, i: usize, d: DirectionTag) -> usize {
        let n = self.len();
        match d {
            DirectionTag::Forward => (i + 1) % n,
            DirectionTag::Reverse => (i + n - 1) % n,
        }
    }

    fn check_index(&self, i: usize) -> Result<(), ConfigError> {
        if i >= self.len() {
            Err(ConfigError::IndexOutOfRange { index: i, n: self.len() })
        } else {
            Ok(())
        }
    }

    /// Gap sequence read from robot `i` in direction `d`.
    pub fn rooted_sequence(&self, i: usize, d: DirectionTag) -> GapSequence {
        let g = self.gaps();
        GapSequence::from_gaps_unchecked(rooted_gaps(&g, i, d))
    }

    /// What robot `i` sees. With `flip` the adversary swaps its sense of direction.
    pub fn snapshot_of(&self, i: usize, flip: bool) -> Result<Snapshot, ConfigError> {
        self.check_index(i)?;
        let g = self.gaps();
        let fwd = GapSequence::from_gaps_unchecked(rooted_gaps(&g, i, DirectionTag::Forward));
        let rev = GapSequence::from_gaps_unchecked(rooted_gaps(&g, i, DirectionTag::Reverse));
        let (forward_gaps, reverse_gaps) = if flip { (rev, fwd) } else { (fwd, rev) };
        Ok(Snapshot { forward_gaps, reverse_gaps, observer_index: i })
    }
}

fn rooted_gaps(g: &[TurnAngle], i: usize, d: DirectionTag) -> Vec<TurnAngle> {
    let n = g.len();
    match d {
        DirectionTag::Forward => (0..n).map(|k| g[(i + k) % n].clone()).collect(),
        DirectionTag::Reverse => (0..n).map(|k| g[(i + 2 * n - 1 - k) % n].clone()).collect(),
    }
}

/// A robot's view: its two rooted gap sequences, with no absolute orientation.
///
/// `reverse_gaps` is always the reversal of `forward_gaps`; which physical
/// direction counts as forward is the adversary's choice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub forward_gaps: GapSequence,
    pub reverse_gaps: GapSequence,
    pub observer_index: usize,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.forward_gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward_gaps.is_empty()
    }

    /// The configuration in the observer's own frame: observer at 0, index 0,
    /// robot `k` the `k`-th one met travelling forward.
    pub fn local_configuration(&self) -> Configuration {
        let mut acc = TurnAngle::zero();
        let mut positions = Vec::with_capacity(self.len());
        for g in self.forward_gaps.gaps() {
            positions.push(acc.clone());
            acc = acc + g;
        }
        Configuration { positions }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Nominee {
    pub index: usize,
    pub direction: DirectionTag,
}

/// Every (robot, direction) whose rooted sequence equals the global minimum.
pub fn nominees(c: &Configuration) -> Result<Vec<Nominee>, ConfigError> {
    let k = c.fold();
    if k > 1 {
        return Err(ConfigError::Symmetric(k));
    }
    Ok(nominees_unchecked(c))
}

pub(crate) fn nominees_unchecked(c: &Configuration) -> Vec<Nominee> {
    let g = c.gaps();
    let n = g.len();
    let h: Vec<TurnAngle> = g.iter().rev().cloned().collect();
    let bf = min_rotation_offset(&g);
    let br = min_rotation_offset(&h);
    // compare best forward rotation with best reverse rotation
    let ord = (0..n)
        .map(|k| g[(bf + k) % n].cmp(&h[(br + k) % n]))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal);
    let mut out = Vec::new();
    if ord != Ordering::Greater {
        for i in 0..n {
            if cmp_rotations(&g, i, bf) == Ordering::Equal {
                out.push(Nominee { index: i, direction: DirectionTag::Forward });
            }
        }
    }
    if ord != Ordering::Less {
        for s in 0..n {
            if cmp_rotations(&h, s, br) == Ordering::Equal {
                // reverse reading starting at h[s] is rooted at robot (n - s) mod n
                out.push(Nominee { index: (n - s) % n, direction: DirectionTag::Reverse });
            }
        }
    }
    out.sort_by_key(|x| (x.index, x.direction));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcPopulation {
    pub count_a: usize,
    pub count_b: usize,
    pub on_bisector: Vec<usize>,
}

/// Split the robots by the bisector of nominees `a` and `b`.
pub fn arc_population(c: &Configuration, a: usize, b: usize) -> Result<ArcPopulation, ConfigError> {
    c.check_index(a)?;
    c.check_index(b)?;
    let (p, q) = bisector_points(c.position(a), c.position(b))?;
    let half = TurnAngle::half_turn();
    let side = |x: &TurnAngle| angle_between(&p, x, DirectionTag::Forward) < half;
    let side_a = side(c.position(a));
    let mut pop = ArcPopulation { count_a: 0, count_b: 0, on_bisector: Vec::new() };
    for (i, x) in c.positions().iter().enumerate() {
        if *x == p || *x == q {
            pop.on_bisector.push(i);
        } else if side(x) == side_a {
            pop.count_a += 1;
        } else {
            pop.count_b += 1;
        }
    }
    Ok(pop)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConfigClass {
    Symmetric { fold: usize },
    Leader { leader: usize, pivotal: DirectionTag },
    DoubleNomineeTied { nominees: [usize; 2], on_bisector: Vec<usize> },
}

impl ConfigClass {
    pub fn is_leader(&self) -> bool {
        matches!(self, ConfigClass::Leader { .. })
    }

    /// The single robot on the bisector of a tied double-nominee configuration.
    pub fn bisector_robot(&self) -> Option<usize> {
        match self {
            ConfigClass::DoubleNomineeTied { on_bisector, .. } if on_bisector.len() == 1 => Some(on_bisector[0]),
            _ => None,
        }
    }
}

pub fn classify(c: &Configuration) -> Result<ConfigClass, ConfigError> {
    if c.len() < 3 {
        return Err(ConfigError::TooFew(c.len()));
    }
    let k = c.fold();
    if k > 1 {
        return Ok(ConfigClass::Symmetric { fold: k });
    }
    classify_asymmetric(c)
}

/// Classification for a configuration already known to be asymmetric.
pub(crate) fn classify_asymmetric(c: &Configuration) -> Result<ConfigClass, ConfigError> {
    let noms = nominees_unchecked(c);
    let mut robots: Vec<usize> = noms.iter().map(|x| x.index).collect();
    robots.dedup();
    match robots.as_slice() {
        [single] => {
            if noms.len() > 1 {
                return Err(ConfigError::AmbiguousPivotal(*single));
            }
            Ok(ConfigClass::Leader { leader: *single, pivotal: noms[0].direction })
        }
        [a, b] => {
            let pop = arc_population(c, *a, *b)?;
            let dir_of = |r: usize| noms.iter().find(|x| x.index == r).map(|x| x.direction).unwrap();
            match pop.count_a.cmp(&pop.count_b) {
                Ordering::Greater => Ok(ConfigClass::Leader { leader: *a, pivotal: dir_of(*a) }),
                Ordering::Less => Ok(ConfigClass::Leader { leader: *b, pivotal: dir_of(*b) }),
                Ordering::Equal => {
                    Ok(ConfigClass::DoubleNomineeTied { nominees: [*a, *b], on_bisector: pop.on_bisector })
                }
            }
        }
        // more than two nominees contradicts distinct rooted sequences of an asymmetric set
        _ => unreachable!("asymmetric configuration with {} nominees", robots.len()),
    }
}

/// Direction in which `leader` reads its smaller rooted sequence.
pub fn pivotal_direction(c: &Configuration, leader: usize) -> Result<DirectionTag, ConfigError> {
    c.check_index(leader)?;
    match classify(c)? {
        ConfigClass::Leader { leader: l, pivotal } if l == leader => {
            let f = c.rooted_sequence(leader, DirectionTag::Forward);
            let r = c.rooted_sequence(leader, DirectionTag::Reverse);
            match f.lex_compare(&r)? {
                Ordering::Less => Ok(DirectionTag::Forward),
                Ordering::Greater => Ok(DirectionTag::Reverse),
                Ordering::Equal => Err(ConfigError::AmbiguousPivotal(leader)),
            }
            .inspect(|d| debug_assert_eq!(*d, pivotal))
        }
        _ => Err(ConfigError::NotLeader(leader)),
    }
}

/// Robots relabelled from the leader along the pivotal direction: `order[k]`
/// is the presentation index of `r_k`, `alphas[k]` the gap from `r_k` to `r_{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaderFrame {
    pub leader: usize,
    pub pivotal: DirectionTag,
    pub order: Vec<usize>,
    pub alphas: Vec<TurnAngle>,
    /// Distance from the leader to `r_k` along the pivotal direction.
    pub offsets: Vec<TurnAngle>,
}

impl LeaderFrame {
    pub fn new(c: &Configuration, leader: usize, pivotal: DirectionTag) -> Self {
        let n = c.len();
        let order: Vec<usize> = (0..n)
            .map(|k| match pivotal {
                DirectionTag::Forward => (leader + k) % n,
                DirectionTag::Reverse => (leader + n - k) % n,
            })
            .collect();
        let alphas = c.rooted_sequence(leader, pivotal).into_vec();
        let mut offsets = Vec::with_capacity(n);
        let mut acc = TurnAngle::zero();
        for a in &alphas {
            offsets.push(acc.clone());
            acc = acc + a;
        }
        LeaderFrame { leader, pivotal, order, alphas, offsets }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Rank of presentation index `i` (its `k` in `r_k`).
    pub fn rank_of(&self, i: usize) -> usize {
        self.order.iter().position(|&x| x == i).expect("index in frame")
    }

    /// Presentation-frame position at pivotal distance `offset` from the leader.
    pub fn absolute(&self, c: &Configuration, offset: &TurnAngle) -> TurnAngle {
        self.pivotal.advance(c.position(self.leader), offset)
    }

    /// `min` over `alphas[k]` for `k >= from`, together with `beta0`.
    pub fn min_alpha_from(&self, from: usize, beta0: &TurnAngle) -> TurnAngle {
        self.alphas[from..].iter().chain(std::iter::once(beta0)).min().unwrap().clone()
    }
}
