//! Exact circle arithmetic: angles as rational fractions of a turn, plus the
//! cyclic-sequence utilities everything else is built on.

mod angle;
mod sequence;

pub use angle::{angle_between, DirectionTag, TurnAngle};
pub use sequence::{bisector_points, rotational_fold, GapSequence};
pub(crate) use sequence::{cmp_rotations, min_rotation_offset};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CircleError {
    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("bisector of a point with itself is undefined")]
    Degenerate,
    #[error("empty gap sequence")]
    Empty,
    #[error("gap {0} is not strictly positive")]
    NonPositiveGap(usize),
    #[error("gaps sum to {0} turns, expected exactly one")]
    BadTotal(TurnAngle),
    #[error("cannot parse rational literal {0:?}")]
    Parse(String),
}
