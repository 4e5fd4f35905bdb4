//! Arbitrary pattern formation by oblivious, silent, chirality-free robots on
//! a continuous circle under a semi-synchronous scheduler.
//!
//! All angles are exact rationals of one full turn ([`TurnAngle`]). Robots only
//! ever see a [`Snapshot`]: two gap sequences with no absolute orientation.

pub mod algorithm;
pub mod circle_math;
pub mod configuration;
pub mod harness;
pub mod simulator;

pub use algorithm::{compute, Decision, Embedding, IntervalChoice, Rules, TargetPattern};
pub use circle_math::{angle_between, bisector_points, rotational_fold, DirectionTag, GapSequence, TurnAngle};
pub use configuration::{classify, nominees, ConfigClass, Configuration, Snapshot};
pub use simulator::{ActivationPolicy, RoundRecord, RunReport};
