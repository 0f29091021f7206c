use super::{InstanceError, SchedulingInstance};
use crate::gdp::{Disjunct, GdpModel, LinRow, LogicRow, VarId};

/// Start variables `x[i] ∈ [r_i, d_i − p_i]`, the make-span `MS` and the
/// rows `x_i + p_i ≤ MS`. Release and due times live in the boxes.
fn job_vars(m: &mut GdpModel, inst: &SchedulingInstance) -> (Vec<VarId>, VarId) {
    let xs: Vec<VarId> =
        inst.jobs.iter().enumerate().map(|(i, j)| m.add_var(format!("x[{i}]"), j.r, j.d - j.p)).collect();
    let ms = make_span(m, inst);
    for (i, j) in inst.jobs.iter().enumerate() {
        m.add_global(LinRow::le([(xs[i], 1.0), (ms, -1.0)], -j.p));
    }
    (xs, ms)
}

/// `MS ∈ [max(r + p), min(Σp + max r, max d)]`; any feasible schedule
/// finishes inside this range.
fn make_span(m: &mut GdpModel, inst: &SchedulingInstance) -> VarId {
    let lo = inst.jobs.iter().map(|j| j.r + j.p).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = inst.jobs.iter().map(|j| j.p).sum();
    let max_r = inst.jobs.iter().map(|j| j.r).fold(f64::NEG_INFINITY, f64::max);
    let max_d = inst.jobs.iter().map(|j| j.d).fold(f64::NEG_INFINITY, f64::max);
    let ms = m.add_var("MS", lo, (total + max_r).min(max_d));
    m.set_objective([(ms, 1.0)]);
    ms
}

/// `x_i − x_j ≤ −p_i`, i.e. job `i` completes before `j` starts.
fn before(xs: &[VarId], inst: &SchedulingInstance, i: usize, j: usize) -> LinRow {
    LinRow::le([(xs[i], 1.0), (xs[j], -1.0)], -inst.jobs[i].p)
}

/// General precedence: one two-term disjunction per job pair.
pub fn build_gp(inst: &SchedulingInstance) -> Result<GdpModel, InstanceError> {
    inst.validate()?;
    let mut m = GdpModel::new("GP");
    let (xs, _) = job_vars(&mut m, inst);
    let n = inst.len();
    for i in 0..n {
        for j in i + 1..n {
            let y = m.add_bool(format!("Y[{i},{j}]"));
            let not_y = m.add_bool(format!("notY[{i},{j}]"));
            m.add_disjunction(
                format!("order[{i},{j}]"),
                vec![
                    Disjunct { indicator: y, rows: vec![before(&xs, inst, i, j)] },
                    Disjunct { indicator: not_y, rows: vec![before(&xs, inst, j, i)] },
                ],
            );
        }
    }
    Ok(m)
}

/// General precedence with the start-time bounds embedded in every disjunct,
/// so both disjuncts bound `x_i − x_j` from above and below.
pub fn build_gp_strengthened(inst: &SchedulingInstance) -> Result<GdpModel, InstanceError> {
    inst.validate()?;
    let mut m = GdpModel::new("GP_S");
    let (xs, _) = job_vars(&mut m, inst);
    let n = inst.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (inst.jobs[i], inst.jobs[j]);
            let diff = [(xs[i], 1.0), (xs[j], -1.0)];
            // Box-implied range of x_i − x_j.
            let lo = a.r - (b.d - b.p);
            let hi = (a.d - a.p) - b.r;
            let y = m.add_bool(format!("Y[{i},{j}]"));
            let not_y = m.add_bool(format!("notY[{i},{j}]"));
            m.add_disjunction(
                format!("order[{i},{j}]"),
                vec![
                    Disjunct {
                        indicator: y,
                        rows: vec![LinRow::ge(diff, lo), LinRow::le(diff, (-a.p).min(hi))],
                    },
                    Disjunct {
                        indicator: not_y,
                        rows: vec![LinRow::ge(diff, b.p.max(lo)), LinRow::le(diff, hi)],
                    },
                ],
            );
        }
    }
    Ok(m)
}

/// Immediate precedence: each job picks a successor or is last, picks a
/// predecessor or is first; exactly one first and one last job, never the
/// same job.
pub fn build_ip(inst: &SchedulingInstance) -> Result<GdpModel, InstanceError> {
    inst.validate()?;
    let n = inst.len();
    if n < 2 {
        return Err(InstanceError::TooFewJobs(n));
    }
    let mut m = GdpModel::new("IP");
    let (xs, _) = job_vars(&mut m, inst);

    let mut next = vec![vec![None; n]; n];
    for (i, row) in next.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if i != j {
                *slot = Some(m.add_bool(format!("Y[{i},{j}]")));
            }
        }
    }
    let first: Vec<_> = (0..n).map(|i| m.add_bool(format!("first[{i}]"))).collect();
    let last: Vec<_> = (0..n).map(|i| m.add_bool(format!("last[{i}]"))).collect();
    let others = |i: usize| (0..n).filter(move |&j| j != i);
    // Job i starts after every other job has finished.
    let last_rows = |i: usize| others(i).map(|j| before(&xs, inst, j, i)).collect::<Vec<_>>();
    let first_rows = |i: usize| others(i).map(|j| before(&xs, inst, i, j)).collect::<Vec<_>>();

    for i in 0..n {
        let mut succ: Vec<Disjunct> = others(i)
            .map(|j| Disjunct { indicator: next[i][j].unwrap(), rows: vec![before(&xs, inst, i, j)] })
            .collect();
        succ.push(Disjunct { indicator: last[i], rows: last_rows(i) });
        m.add_disjunction(format!("successor[{i}]"), succ);

        let mut pred: Vec<Disjunct> = others(i)
            .map(|j| Disjunct { indicator: next[j][i].unwrap(), rows: vec![before(&xs, inst, j, i)] })
            .collect();
        pred.push(Disjunct { indicator: first[i], rows: first_rows(i) });
        m.add_disjunction(format!("predecessor[{i}]"), pred);
    }
    m.add_disjunction("first", (0..n).map(|i| Disjunct { indicator: first[i], rows: first_rows(i) }).collect());
    m.add_disjunction("last", (0..n).map(|i| Disjunct { indicator: last[i], rows: last_rows(i) }).collect());
    for i in 0..n {
        m.add_logic(LogicRow::at_most_one([first[i], last[i]]));
    }
    Ok(m)
}

/// Time slots: `|T| = |I|` ordered slots, each holding exactly one job, each
/// job in exactly one slot.
pub fn build_ts(inst: &SchedulingInstance) -> Result<GdpModel, InstanceError> {
    inst.validate()?;
    let n = inst.len();
    let mut m = GdpModel::new("TS");
    let min_r = inst.jobs.iter().map(|j| j.r).fold(f64::INFINITY, f64::min);
    let max_d = inst.jobs.iter().map(|j| j.d).fold(f64::NEG_INFINITY, f64::max);
    let xs: Vec<VarId> = (0..n).map(|t| m.add_var(format!("x[{t}]"), min_r, max_d)).collect();
    let ms = make_span(&mut m, inst);
    let y: Vec<Vec<_>> =
        (0..n).map(|i| (0..n).map(|t| m.add_bool(format!("y[{i},{t}]"))).collect()).collect();
    for t in 0..n {
        let following = if t + 1 < n { xs[t + 1] } else { ms };
        let disjuncts = inst
            .jobs
            .iter()
            .enumerate()
            .map(|(i, job)| Disjunct {
                indicator: y[i][t],
                rows: vec![
                    LinRow::ge([(following, 1.0), (xs[t], -1.0)], job.p),
                    LinRow::ge([(xs[t], 1.0)], job.r),
                    LinRow::le([(xs[t], 1.0)], job.d - job.p),
                ],
            })
            .collect();
        m.add_disjunction(format!("slot[{t}]"), disjuncts);
    }
    for row in &y {
        m.add_logic(LogicRow::exactly_one(row.iter().copied()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdp::{validate, Sense};
    use crate::reformulate::{align_disjunction, shared_lhs};

    fn three_jobs() -> SchedulingInstance {
        SchedulingInstance::new([(2.0, 0.0, 10.0), (3.0, 1.0, 10.0), (1.0, 4.0, 10.0)])
    }

    #[test]
    fn gp_structure() {
        let inst = SchedulingInstance::new([(3.0, 0.0, 10.0), (2.0, 0.0, 10.0)]);
        let m = build_gp(&inst).unwrap();
        assert!(validate(&m).is_empty());
        assert_eq!(m.disjunctions.len(), 1);
        assert_eq!(m.bools.len(), 2);
        let ms = m.var_by_name("MS").unwrap();
        assert_eq!((m.var(ms).lower, m.var(ms).upper), (3.0, 5.0));
    }

    #[test]
    fn single_job_has_no_disjunctions() {
        let m = build_gp(&SchedulingInstance::new([(4.0, 1.0, 10.0)])).unwrap();
        assert!(m.disjunctions.is_empty());
        assert_eq!(m.var(VarId(0)).lower, 1.0);
    }

    #[test]
    fn infeasible_job_is_rejected() {
        let err = build_gp(&SchedulingInstance::new([(1.0, 0.0, 5.0), (5.0, 0.0, 4.0)])).unwrap_err();
        assert!(matches!(err, InstanceError::InfeasibleJob { index: 1, .. }));
    }

    #[test]
    fn strengthened_bounds_for_two_jobs() {
        let inst = SchedulingInstance::new([(3.0, 0.0, 10.0), (2.0, 0.0, 10.0)]);
        let m = build_gp_strengthened(&inst).unwrap();
        let d = &m.disjunctions[0];
        assert!(shared_lhs(d));
        let true_rows = &d.disjuncts[0].rows;
        assert_eq!(true_rows[0].sense, Sense::Ge);
        assert_eq!(true_rows[0].rhs, -8.0);
        assert_eq!(true_rows[1].rhs, -3.0);
        // ¬Y: x_1 − x_2 ∈ [max(2, −8), 7 − 0]
        assert_eq!(d.disjuncts[1].rows[0].rhs, 2.0);
        assert_eq!(d.disjuncts[1].rows[1].rhs, 7.0);
    }

    #[test]
    fn aligning_gp_gives_strengthened_gp() {
        let inst = SchedulingInstance::new([(3.0, 1.0, 12.0), (2.0, 0.0, 9.0), (4.0, 2.0, 15.0)]);
        let gp = build_gp(&inst).unwrap();
        let gps = build_gp_strengthened(&inst).unwrap();
        for (a, b) in gp.disjunctions.iter().zip(&gps.disjunctions) {
            let aligned = align_disjunction(a, &gp.vars);
            assert_eq!(aligned, align_disjunction(b, &gps.vars));
            assert_eq!(aligned, crate::gdp::canonicalize_disjunction(b));
        }
    }

    #[test]
    fn ip_structure() {
        let m = build_ip(&three_jobs()).unwrap();
        assert!(validate(&m).is_empty());
        // successor + predecessor per job, plus first and last
        assert_eq!(m.disjunctions.len(), 3 * 2 + 2);
        assert_eq!(m.logic.len(), 3);
        let succ = &m.disjunctions[0];
        assert_eq!(succ.disjuncts.len(), 3);
        assert_eq!(succ.disjuncts.last().unwrap().rows.len(), 2);
        assert!(!shared_lhs(succ));
        assert!(matches!(build_ip(&SchedulingInstance::new([(1.0, 0.0, 2.0)])), Err(InstanceError::TooFewJobs(1))));
    }

    #[test]
    fn ts_structure() {
        let m = build_ts(&three_jobs()).unwrap();
        assert!(validate(&m).is_empty());
        assert_eq!(m.disjunctions.len(), 3);
        assert!(m.disjunctions.iter().all(shared_lhs));
        assert_eq!(m.logic.len(), 3);
        assert_eq!(m.vars.len(), 4);
    }
}
