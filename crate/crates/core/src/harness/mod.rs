//! Instance generation, batch experiments and offline trace verification.
//! File handling lives in the CLI; everything here works on in-memory values.

mod batch;
mod gen;
mod verify;

pub use batch::{batch, instance_seed, BatchCell, BatchSpec, SchedulerKind, CSV_HEADER};
pub use gen::{gen_instance, GenError, MAX_ATTEMPTS};
pub use verify::{verify_trace, Verdict};
