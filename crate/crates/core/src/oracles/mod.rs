//! Brute-force ground truth for small instances, independent of the
//! reformulations and of the LP solver.

mod hull;
mod scheduling;
mod strip;

use thiserror::Error;

pub use hull::{hull_oracle_1d2d, mask_mismatches, relaxation_mask, HullMask, DEFAULT_STEPS};
pub use scheduling::{sched_oracle, Schedule, MAX_JOBS};
pub use strip::{strip_oracle, Packing, Relation, MAX_RECTS};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{n} items exceed the enumeration budget of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("hull oracle handles 1 or 2 variables, got {0}")]
    Dimension(usize),
    #[error(transparent)]
    Instance(#[from] crate::builders::InstanceError),
}

/// Optimum over all enumerated candidates, `None` when none is feasible,
/// with the first optimal candidate found.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<W> {
    pub optimum: Option<f64>,
    pub witness: Option<W>,
}
