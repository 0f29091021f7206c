//! Case-study models: single-machine scheduling (general precedence,
//! immediate precedence, time slots) and two-dimensional strip packing.

mod generate;
mod scheduling;
mod strip;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{gen_scheduling, gen_strip};
pub use scheduling::{build_gp, build_gp_strengthened, build_ip, build_ts};
pub use strip::{build_strip, StripVariant};

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("job {index}: release {r} + processing {p} exceeds due time {d}")]
    InfeasibleJob { index: usize, p: f64, r: f64, d: f64 },
    #[error("job {index}: times must be finite and nonnegative")]
    BadJob { index: usize },
    #[error("rectangle {index}: height {h} exceeds strip width {width}")]
    TooTall { index: usize, h: f64, width: f64 },
    #[error("rectangle {index}: sides must be positive and finite")]
    BadRect { index: usize },
    #[error("strip length bound {ub} is below the longest rectangle {longest}")]
    BoundTooSmall { ub: f64, longest: f64 },
    #[error("instance has no items")]
    Empty,
    #[error("immediate precedence needs at least 2 jobs, got {0}")]
    TooFewJobs(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub p: f64,
    pub r: f64,
    pub d: f64,
}

/// Jobs on one machine with processing, release and due times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulingInstance {
    pub jobs: Vec<Job>,
}

impl SchedulingInstance {
    pub fn new(jobs: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        SchedulingInstance { jobs: jobs.into_iter().map(|(p, r, d)| Job { p, r, d }).collect() }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.jobs.is_empty() {
            return Err(InstanceError::Empty);
        }
        for (index, j) in self.jobs.iter().enumerate() {
            if ![j.p, j.r, j.d].iter().all(|v| v.is_finite() && *v >= 0.0) {
                return Err(InstanceError::BadJob { index });
            }
            if j.r + j.p > j.d {
                return Err(InstanceError::InfeasibleJob { index, p: j.p, r: j.r, d: j.d });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

/// Rectangles of length `L` and height `H` to place in a strip of width `W`,
/// with `ub` a valid upper bound on the used length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripInstance {
    pub rects: Vec<Rect>,
    #[serde(rename = "W")]
    pub width: f64,
    #[serde(rename = "UB")]
    pub ub: f64,
}

impl StripInstance {
    /// Strip with the default length bound `Σ L`.
    pub fn new(rects: impl IntoIterator<Item = (f64, f64)>, width: f64) -> Self {
        let rects: Vec<Rect> = rects.into_iter().map(|(l, h)| Rect { l, h }).collect();
        let ub = rects.iter().map(|r| r.l).sum();
        StripInstance { rects, width, ub }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.rects.is_empty() {
            return Err(InstanceError::Empty);
        }
        for (index, r) in self.rects.iter().enumerate() {
            if !(r.l.is_finite() && r.h.is_finite() && r.l > 0.0 && r.h > 0.0) {
                return Err(InstanceError::BadRect { index });
            }
            if r.h > self.width {
                return Err(InstanceError::TooTall { index, h: r.h, width: self.width });
            }
        }
        let longest = self.rects.iter().map(|r| r.l).fold(0.0, f64::max);
        if self.ub.is_nan() || self.ub < longest {
            return Err(InstanceError::BoundTooSmall { ub: self.ub, longest });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }
}
