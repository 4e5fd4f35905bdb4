//! Random tie break for even swarms whose two nominees cannot be told apart.

use std::ops::Range;

use rand::{Rng, RngCore};

use super::{AlgoError, Decision};
use crate::circle_math::{DirectionTag, TurnAngle};
use crate::configuration::{classify, nominees_unchecked, ConfigClass, Configuration, Snapshot};

/// Range of the random denominator `M` drawn per activation.
pub const TIE_BREAK_MODULUS_RANGE: Range<u64> = (1 << 20)..(1 << 30);

/// The observer (a tied nominee) steps `ε ∈ (0, α₀/2)` toward the neighbour
/// in the direction of its minimum sequence.
pub fn randomized_nominee_move(s: &Snapshot, rng: &mut dyn RngCore) -> Result<Decision, AlgoError> {
    tie_break_move(&s.local_configuration(), rng).map(|(d, _)| d)
}

/// Decision in the local frame (observer at index 0) plus the drawn `ε`.
pub(crate) fn tie_break_move(c: &Configuration, rng: &mut dyn RngCore) -> Result<(Decision, TurnAngle), AlgoError> {
    let n = c.len();
    if n % 2 == 1 || n < 4 {
        return Err(AlgoError::NotTiedNominee);
    }
    match classify(c)? {
        ConfigClass::DoubleNomineeTied { nominees, .. } if nominees.contains(&0) => {}
        _ => return Err(AlgoError::NotTiedNominee),
    }
    let dir = nominees_unchecked(c)
        .into_iter()
        .filter(|x| x.index == 0)
        .map(|x| x.direction)
        .min()
        .unwrap_or(DirectionTag::Forward);
    let alpha0 = c.gaps().into_iter().min().expect("nonempty");
    let m = rng.random_range(TIE_BREAK_MODULUS_RANGE);
    let k = rng.random_range(1..m);
    let eps = alpha0.half().mul(&TurnAngle::from_ratio(num_rational::BigRational::new(k.into(), m.into())));
    let destination = dir.advance(&TurnAngle::zero(), &eps);
    Ok((Decision::MoveTo { destination, path_direction: dir }, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(n: i64, d: i64) -> TurnAngle {
        TurnAngle::new(n, d)
    }

    #[test]
    fn epsilon_is_inside_half_the_minimum_gap() {
        // mirror image of itself about the bisector of the nominees at 0 and 1/10
        let c = Configuration::new(vec![t(0, 1), t(1, 10), t(1, 4), t(1, 2), t(3, 5), t(17, 20)]).unwrap();
        assert!(matches!(classify(&c).unwrap(), ConfigClass::DoubleNomineeTied { .. }));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (d, eps) = tie_break_move(&c, &mut rng).unwrap();
            assert!(eps.is_positive() && eps < t(1, 20));
            assert!(d.is_move());
        }
    }

    #[test]
    fn rejects_odd_and_non_nominee() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let odd = Configuration::new(vec![t(0, 1), t(1, 10), t(3, 10), t(7, 10), t(9, 10)]).unwrap();
        assert!(tie_break_move(&odd, &mut rng).is_err());
        let c = Configuration::new(vec![t(0, 1), t(1, 10), t(1, 4), t(1, 2), t(3, 5), t(17, 20)]).unwrap();
        let rotated = c.rotated_by(&t(-1, 2));
        // robot 0 of the rotated copy is the old 1/2, not a nominee
        assert_eq!(rotated.position(0), &t(0, 1));
        assert!(tie_break_move(&rotated, &mut rng).is_err());
    }
}
