//! Seeded random instances.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algorithm::TargetPattern;
use crate::circle_math::TurnAngle;
use crate::configuration::Configuration;

pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least 3 robots, got {0}")]
    TooFew(usize),
    #[error("denominator bound {q} is below 4n = {min}")]
    DenominatorTooSmall { q: u64, min: u64 },
    #[error("no asymmetric configuration found in {0} attempts")]
    Exhausted(usize),
}

fn distinct_sorted(rng: &mut ChaCha8Rng, k: usize, range: std::ops::Range<u64>) -> Vec<u64> {
    let mut set = BTreeSet::new();
    while set.len() < k {
        set.insert(rng.random_range(range.clone()));
    }
    set.into_iter().collect()
}

/// `n` distinct positions on the `1/q` grid with no rotational symmetry, and a
/// pattern of `n` positive gaps on the same grid.
pub fn gen_instance(n: usize, seed: u64, q: u64) -> Result<(Configuration, TargetPattern), GenError> {
    if n < 3 {
        return Err(GenError::TooFew(n));
    }
    let min = 4 * n as u64;
    if q < min {
        return Err(GenError::DenominatorTooSmall { q, min });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q_i = i64::try_from(q).expect("denominator fits i64");
    let mut config = None;
    for _ in 0..MAX_ATTEMPTS {
        let ks = distinct_sorted(&mut rng, n, 0..q);
        let c = Configuration::new(ks.iter().map(|&k| TurnAngle::new(k as i64, q_i)).collect())
            .expect("distinct grid points");
        if c.fold() == 1 {
            config = Some(c);
            break;
        }
    }
    let config = config.ok_or(GenError::Exhausted(MAX_ATTEMPTS))?;
    let mut cuts = distinct_sorted(&mut rng, n - 1, 1..q);
    cuts.insert(0, 0);
    cuts.push(q);
    let gaps = cuts.windows(2).map(|w| TurnAngle::new((w[1] - w[0]) as i64, q_i)).collect();
    let pattern = TargetPattern::from_gaps(gaps).expect("positive gaps summing to one");
    Ok((config, pattern))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_contract() {
        let (c, p) = gen_instance(5, 7, 20).unwrap();
        assert_eq!(c.fold(), 1);
        assert_eq!(c.len(), 5);
        assert_eq!(p.betas().gaps().iter().sum::<TurnAngle>(), TurnAngle::one());
        assert_eq!(gen_instance(5, 7, 20).unwrap(), (c, p));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(gen_instance(2, 0, 100), Err(GenError::TooFew(2)));
        assert!(matches!(gen_instance(5, 0, 19), Err(GenError::DenominatorTooSmall { .. })));
    }

    #[test]
    fn never_emits_symmetric_configurations() {
        // on a grid of 16 with 4 robots, symmetric draws are common
        for seed in 0..200 {
            let (c, _) = gen_instance(4, seed, 16).unwrap();
            assert_eq!(c.fold(), 1);
        }
    }
}
