use itertools::Itertools;

use super::{OracleError, OracleResult};
use crate::builders::SchedulingInstance;

pub const MAX_JOBS: usize = 9;

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub sequence: Vec<usize>,
    /// Start time per job index.
    pub starts: Vec<f64>,
    pub makespan: f64,
}

/// Minimum make-span over all job sequences.
///
/// Each sequence is timed by starting every job as early as its release and
/// its predecessor allow. Any other schedule with the same sequence starts
/// each job no earlier, so its completion times, and hence its make-span,
/// are no smaller.
pub fn sched_oracle(inst: &SchedulingInstance) -> Result<OracleResult<Schedule>, OracleError> {
    inst.validate()?;
    let n = inst.len();
    if n > MAX_JOBS {
        return Err(OracleError::TooLarge { n, max: MAX_JOBS });
    }
    let mut best: Option<Schedule> = None;
    for sequence in (0..n).permutations(n) {
        let mut starts = vec![0.0; n];
        let mut clock = f64::NEG_INFINITY;
        let feasible = sequence.iter().all(|&i| {
            let job = inst.jobs[i];
            starts[i] = clock.max(job.r);
            clock = starts[i] + job.p;
            clock <= job.d
        });
        if feasible && best.as_ref().is_none_or(|b| clock < b.makespan) {
            best = Some(Schedule { sequence, starts, makespan: clock });
        }
    }
    Ok(OracleResult { optimum: best.as_ref().map(|b| b.makespan), witness: best })
}
