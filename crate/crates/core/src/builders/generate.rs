use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Job, Rect, SchedulingInstance, StripInstance};

/// Random scheduling instance: `p ∈ [1, 10]`, `r ∈ [0, 2n]`,
/// `d = r + p + U[0, 3n]`, all integer.
///
/// Due times are then raised where needed so that processing the jobs in
/// release order (ties by index) meets every due time; every generated
/// instance is feasible.
pub fn gen_scheduling(n: usize, seed: u64) -> SchedulingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_i = n as i64;
    let mut jobs: Vec<Job> = (0..n)
        .map(|_| {
            let p = rng.random_range(1..=10i64);
            let r = rng.random_range(0..=2 * n_i);
            let slack = rng.random_range(0..=3 * n_i);
            Job { p: p as f64, r: r as f64, d: (r + p + slack) as f64 }
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| jobs[a].r.total_cmp(&jobs[b].r).then(a.cmp(&b)));
    let mut clock = f64::NEG_INFINITY;
    for i in order {
        let done = clock.max(jobs[i].r) + jobs[i].p;
        jobs[i].d = jobs[i].d.max(done);
        clock = done;
    }
    SchedulingInstance { jobs }
}

/// Random strip instance: `L, H ∈ [1, 10]`, `W = 10`, `UB = Σ L`.
pub fn gen_strip(n: usize, seed: u64) -> StripInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rects: Vec<Rect> = (0..n)
        .map(|_| {
            let l = rng.random_range(1..=10i64) as f64;
            let h = rng.random_range(1..=10i64) as f64;
            Rect { l, h }
        })
        .collect();
    let ub = rects.iter().map(|r| r.l).sum();
    StripInstance { rects, width: 10.0, ub }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(gen_scheduling(5, 1), gen_scheduling(5, 1));
        assert_eq!(gen_strip(5, 1), gen_strip(5, 1));
        assert_ne!(gen_scheduling(5, 1), gen_scheduling(5, 2));
    }

    proptest! {
        #[test]
        fn scheduling_jobs_fit_their_windows(n in 1usize..12, seed in any::<u64>()) {
            let inst = gen_scheduling(n, seed);
            prop_assert_eq!(inst.len(), n);
            prop_assert!(inst.validate().is_ok());
            for j in &inst.jobs {
                prop_assert!(j.r + j.p <= j.d);
                prop_assert!((1.0..=10.0).contains(&j.p));
            }
        }

        #[test]
        fn strip_rects_fit_the_width(n in 1usize..12, seed in any::<u64>()) {
            let inst = gen_strip(n, seed);
            prop_assert!(inst.validate().is_ok());
            prop_assert!(inst.rects.iter().all(|r| r.h <= inst.width));
        }
    }
}
