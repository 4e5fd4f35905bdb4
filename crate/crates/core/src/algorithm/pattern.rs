//! Target patterns and their placement on the circle.

use serde::{Deserialize, Serialize};

use super::AlgoError;
use crate::circle_math::{DirectionTag, GapSequence, TurnAngle};
use crate::configuration::{classify, ConfigClass, Configuration, LeaderFrame};

/// Input angle sequence, kept both as supplied and in its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternFile", into = "PatternFile")]
pub struct TargetPattern {
    betas: GapSequence,
    original: GapSequence,
    /// `prefix[j]` = sum of `betas[..j]`: pivotal offset of target `T_j`.
    #[serde(skip)]
    prefix: Vec<TurnAngle>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub pattern: Vec<TurnAngle>,
}

impl TryFrom<PatternFile> for TargetPattern {
    type Error = AlgoError;
    fn try_from(f: PatternFile) -> Result<Self, AlgoError> {
        TargetPattern::new(GapSequence::new(f.pattern)?)
    }
}

impl From<TargetPattern> for PatternFile {
    fn from(p: TargetPattern) -> Self {
        PatternFile { pattern: p.original.into_vec() }
    }
}

impl TargetPattern {
    pub fn new(original: GapSequence) -> Result<Self, AlgoError> {
        if original.len() < 3 {
            return Err(AlgoError::TooFewRobots(original.len()));
        }
        let (betas, _) = original.min_rotation();
        let mut prefix = Vec::with_capacity(betas.len());
        let mut acc = TurnAngle::zero();
        for b in betas.gaps() {
            prefix.push(acc.clone());
            acc = acc + b;
        }
        Ok(TargetPattern { betas, original, prefix })
    }

    pub fn from_gaps(gaps: Vec<TurnAngle>) -> Result<Self, AlgoError> {
        TargetPattern::new(GapSequence::new(gaps)?)
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn betas(&self) -> &GapSequence {
        &self.betas
    }

    pub fn original(&self) -> &GapSequence {
        &self.original
    }

    pub fn beta(&self, j: usize) -> &TurnAngle {
        self.betas.get(j)
    }

    /// Pivotal distance from `T_0` to `T_j`.
    pub fn target_offset(&self, j: usize) -> &TurnAngle {
        &self.prefix[j]
    }

    /// `β₀ + … + β_{j-1}` for `j = n` is one full turn.
    pub(crate) fn offset_or_turn(&self, j: usize) -> TurnAngle {
        if j >= self.len() {
            TurnAngle::one()
        } else {
            self.prefix[j].clone()
        }
    }
}

/// Targets `T_0 … T_{n-1}` anchored at the leader and laid out along the pivotal direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub targets: Vec<TurnAngle>,
    pub anchor: TurnAngle,
    pub direction: DirectionTag,
}

impl Embedding {
    pub(crate) fn from_anchor(anchor: &TurnAngle, direction: DirectionTag, pattern: &TargetPattern) -> Self {
        let targets = (0..pattern.len()).map(|j| direction.advance(anchor, pattern.target_offset(j))).collect();
        Embedding { targets, anchor: anchor.wrap(), direction }
    }
}

/// Place the pattern with `T_0` on the leader, running along `pivotal`.
pub fn embed_targets(
    c: &Configuration,
    leader: usize,
    pivotal: DirectionTag,
    pattern: &TargetPattern,
) -> Result<Embedding, AlgoError> {
    if c.len() != pattern.len() {
        return Err(AlgoError::SizeMismatch { robots: c.len(), pattern: pattern.len() });
    }
    match classify(c)? {
        ConfigClass::Leader { leader: l, pivotal: p } if l == leader && p == pivotal => {
            Ok(Embedding::from_anchor(c.position(leader), pivotal, pattern))
        }
        _ => Err(AlgoError::NotLeaderConfiguration),
    }
}

/// Does some robot and some direction read the pattern (up to rotation)?
pub fn pattern_formed(c: &Configuration, pattern: &TargetPattern) -> Result<bool, AlgoError> {
    if c.len() != pattern.len() {
        return Err(AlgoError::SizeMismatch { robots: c.len(), pattern: pattern.len() });
    }
    Ok(formed_unchecked(&c.gaps(), pattern))
}

pub(crate) fn formed_unchecked(gaps: &[TurnAngle], pattern: &TargetPattern) -> bool {
    let betas = pattern.betas().gaps();
    let n = gaps.len();
    let matches_at = |seq: &dyn Fn(usize) -> usize| (0..n).any(|s| (0..n).all(|k| gaps[seq((s + k) % n)] == betas[k]));
    matches_at(&|i| i) || matches_at(&|i| n - 1 - i)
}

/// Targets in pivotal offsets, i.e. in the leader frame.
pub(crate) fn tail_formed(frame: &LeaderFrame, pattern: &TargetPattern) -> bool {
    (3..frame.len()).all(|k| &frame.offsets[k] == pattern.target_offset(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: i64, d: i64) -> TurnAngle {
        TurnAngle::new(n, d)
    }

    fn pat(v: &[(i64, i64)]) -> TargetPattern {
        TargetPattern::from_gaps(v.iter().map(|&(n, d)| t(n, d)).collect()).unwrap()
    }

    #[test]
    fn pattern_is_canonicalised() {
        let p = pat(&[(1, 2), (1, 6), (1, 3)]);
        assert_eq!(p.betas().gaps(), &[t(1, 6), t(1, 3), t(1, 2)]);
        assert_eq!(p.original().gaps(), &[t(1, 2), t(1, 6), t(1, 3)]);
        assert_eq!(p.target_offset(2), &t(1, 2));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"pattern":["1/2","1/6","1/3"]}"#);
        let back: TargetPattern = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_short_and_bad_patterns() {
        assert!(TargetPattern::from_gaps(vec![t(1, 2), t(1, 2)]).is_err());
        assert!(serde_json::from_str::<TargetPattern>(r#"{"pattern":["1/2","1/3","1/3"]}"#).is_err());
    }

    #[test]
    fn embedding_examples() {
        let p = pat(&[(1, 6), (1, 3), (1, 2)]);
        let e = Embedding::from_anchor(&t(0, 1), DirectionTag::Forward, &p);
        assert_eq!(e.targets, vec![t(0, 1), t(1, 6), t(1, 2)]);
        let e = Embedding::from_anchor(&t(1, 12), DirectionTag::Reverse, &p);
        assert_eq!(e.targets, vec![t(1, 12), t(11, 12), t(7, 12)]);
        // consecutive target gaps close the circle
        let total: TurnAngle =
            (0..3).map(|j| crate::angle_between(&e.targets[j], &e.targets[(j + 1) % 3], DirectionTag::Reverse)).sum();
        assert_eq!(total, TurnAngle::one());
    }

    #[test]
    fn embed_targets_requires_leader() {
        let c = Configuration::new(vec![t(0, 1), t(1, 12), t(1, 3), t(1, 2), t(17, 24)]).unwrap();
        let p = pat(&[(1, 18), (1, 9), (2, 9), (5, 18), (1, 3)]);
        let e = embed_targets(&c, 0, DirectionTag::Forward, &p).unwrap();
        assert_eq!(e.targets[1], t(1, 18));
        assert!(matches!(embed_targets(&c, 1, DirectionTag::Forward, &p), Err(AlgoError::NotLeaderConfiguration)));
    }

    #[test]
    fn formed_examples() {
        let p = pat(&[(1, 18), (1, 9), (2, 9), (5, 18), (1, 3)]);
        let e = Embedding::from_anchor(&t(3, 7), DirectionTag::Forward, &p);
        let c = Configuration::new(e.targets.clone()).unwrap();
        assert!(pattern_formed(&c, &p).unwrap());
        assert!(pattern_formed(&c.mirrored(), &p).unwrap());
        let fig1 = Configuration::new(vec![t(0, 1), t(1, 12), t(1, 3), t(1, 2), t(17, 24)]).unwrap();
        assert!(!pattern_formed(&fig1, &p).unwrap());
        let three = pat(&[(1, 3), (1, 3), (1, 3)]);
        assert!(pattern_formed(&fig1, &three).is_err());
    }
}
