//! Bounded-variable revised dual simplex.
//!
//! Every row `a·x ⋚ b` gets a logical variable `s` with `a·x + s = b` and
//! bounds encoding the sense (`≤`: `s ≥ 0`, `≥`: `s ≤ 0`, `=`: `s = 0`).
//! With finite boxes on every structural column the all-logical basis is dual
//! feasible once each structural sits at the bound its cost prefers, so no
//! phase one is needed. Changing column bounds keeps dual feasibility, which
//! is what branch-and-bound relies on to re-solve nodes from the previous
//! basis.
//!
//! Results are checked against the original rows before they are reported:
//! optimal points must satisfy every row, reduced costs recomputed from the
//! original columns must have the right signs, and infeasibility must come
//! with a Farkas row. A failed check triggers a refactorization from the
//! current basis, then a cold restart.
//!
//! The basis is held as a sparse LU factor with eta updates; leaving rows are
//! priced by dual steepest edge.

use super::lu::Factor;
use crate::gdp::{MilpModel, Sense};

const PRIMAL_TOL: f64 = 1e-8;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const DUAL_DROP: f64 = 1e-11;
const PERTURBATION: f64 = 1e-7;
/// Eta columns accumulated before a fresh factorization.
const REFACTOR_EVERY: usize = 30;
/// Row and bound violation accepted in a reported optimum.
pub const FEAS_TOL: f64 = 1e-7;
/// Degenerate pivots in a row before switching to Bland's rule.
pub const BLAND_STREAK: u32 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    /// Iteration budget exhausted; only reachable on numerical breakdown.
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
}

enum Outcome {
    Optimal,
    Infeasible(usize),
    IterationLimit,
}

/// A basis snapshot to restart from.
#[derive(Clone, Debug)]
pub(crate) struct Basis {
    head: Vec<usize>,
    state: Vec<State>,
    weight: Vec<f64>,
}

pub(crate) struct DualSimplex {
    m: usize,
    n: usize,
    nc: usize,
    a_rows: Vec<Vec<(usize, f64)>>,
    a_cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    /// Temporary cost shifts from perturbation.
    shift: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    factor: Factor,
    head: Vec<usize>,
    pos: Vec<usize>,
    state: Vec<State>,
    beta: Vec<f64>,
    d: Vec<f64>,
    /// Dual steepest-edge weights `‖e_rᵀB⁻¹‖²` per basis position.
    weight: Vec<f64>,
    trivially_infeasible: bool,
    pub iterations: u64,
}

impl DualSimplex {
    pub fn new(model: &MilpModel) -> Self {
        let n = model.vars.len();
        let mut a_rows = Vec::new();
        let mut b = Vec::new();
        let mut slack_bounds = Vec::new();
        let mut trivially_infeasible = false;
        for r in &model.rows {
            let row = &r.row;
            if row.terms().is_empty() {
                // Empty rows are dropped; a violated one makes the LP infeasible.
                trivially_infeasible |= row.violation(|_| 0.0) > FEAS_TOL;
                continue;
            }
            a_rows.push(row.terms().iter().map(|&(c, a)| (c.0, a)).collect::<Vec<_>>());
            b.push(row.rhs);
            slack_bounds.push(match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            });
        }
        let m = a_rows.len();
        let nc = n + m;
        let mut a_cols = vec![Vec::new(); n];
        for (i, row) in a_rows.iter().enumerate() {
            for &(j, a) in row {
                a_cols[j].push((i, a));
            }
        }
        let mut cost = vec![0.0; nc];
        for &(c, a) in &model.objective {
            cost[c.0] += a;
        }
        let mut lower: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
        let mut upper: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
        lower.extend(slack_bounds.iter().map(|s| s.0));
        upper.extend(slack_bounds.iter().map(|s| s.1));
        let mut lp = DualSimplex {
            m,
            n,
            nc,
            a_rows,
            a_cols,
            b,
            cost,
            shift: vec![0.0; nc],
            lower,
            upper,
            factor: Factor::identity(m),
            head: Vec::new(),
            pos: vec![usize::MAX; nc],
            state: vec![State::Lower; nc],
            beta: vec![0.0; m],
            d: vec![0.0; nc],
            weight: vec![1.0; m],
            trivially_infeasible,
            iterations: 0,
        };
        lp.reset_to_slack_basis();
        lp
    }

    pub fn basis(&self) -> Basis {
        Basis { head: self.head.clone(), state: self.state.clone(), weight: self.weight.clone() }
    }

    pub fn load_basis(&mut self, basis: &Basis) {
        self.head.clone_from(&basis.head);
        self.state.clone_from(&basis.state);
        self.weight.clone_from(&basis.weight);
        self.pos.fill(usize::MAX);
        for (i, &q) in self.head.iter().enumerate() {
            self.pos[q] = i;
        }
        self.refactor();
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.lower[col] = lower;
        self.upper[col] = upper;
    }

    pub fn bounds(&self, col: usize) -> (f64, f64) {
        (self.lower[col], self.upper[col])
    }

    /// Structural column values at the current basis.
    pub fn primal(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.value(j)).collect()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.cost).map(|(a, b)| a * b).sum()
    }

    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            State::Basic => self.beta[self.pos[j]],
            State::Lower => self.lower[j],
            State::Upper => self.upper[j],
        }
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.a_cols[j].clone()
        } else {
            vec![(j - self.n, 1.0)]
        }
    }

    /// `ρ_jᵀ a_j` summed into a dense row vector over all columns.
    fn row_times_matrix(&self, rho: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &r) in rho.iter().enumerate() {
            if r != 0.0 {
                for &(j, a) in &self.a_rows[i] {
                    out[j] += r * a;
                }
                out[self.n + i] = r;
            }
        }
    }

    fn reset_to_slack_basis(&mut self) {
        let n = self.n;
        self.head = (0..self.m).map(|i| n + i).collect();
        self.pos.fill(usize::MAX);
        for i in 0..self.m {
            self.pos[n + i] = i;
            self.state[n + i] = State::Basic;
        }
        for j in 0..n {
            self.state[j] = if self.cost[j] >= 0.0 { State::Lower } else { State::Upper };
        }
        self.factor = Factor::identity(self.m);
        self.weight.fill(1.0);
    }

    fn nonbasic_state(&self, j: usize) -> State {
        if self.lower[j].is_finite() {
            State::Lower
        } else {
            State::Upper
        }
    }

    /// Fresh factorization of the current basis. Positions whose column is
    /// dependent on the others are handed to the logical of an unpivoted row.
    fn refactor(&mut self) {
        for _ in 0..2 {
            let cols: Vec<Vec<(usize, f64)>> = self.head.iter().map(|&q| self.column(q)).collect();
            match Factor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = f;
                    return;
                }
                Err(s) => {
                    for (&p, &row) in s.positions.iter().zip(&s.rows) {
                        let out = self.head[p];
                        self.state[out] = self.nonbasic_state(out);
                        self.pos[out] = usize::MAX;
                        let q = self.n + row;
                        self.head[p] = q;
                        self.pos[q] = p;
                        self.state[q] = State::Basic;
                        self.weight[p] = 1.0;
                    }
                }
            }
        }
        self.reset_to_slack_basis();
    }

    /// Row duals `y` with `yᵀB = c_Bᵀ` for the given costs.
    fn duals(&self, cost: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut e: Vec<f64> = self.head.iter().map(|&q| cost(q)).collect();
        let mut y = vec![0.0; self.m];
        self.factor.btran(&mut e, &mut y);
        y
    }

    fn recompute_duals(&mut self) {
        let y = self.duals(|q| self.cost[q] + self.shift[q]);
        let mut ya = vec![0.0; self.nc];
        self.row_times_matrix(&y, &mut ya);
        for (j, a) in ya.iter().enumerate() {
            self.d[j] = if self.state[j] == State::Basic { 0.0 } else { self.cost[j] + self.shift[j] - a };
        }
    }

    /// Basic values `B⁻¹(b − N·x_N)`.
    fn recompute_primal(&mut self) {
        let mut rhs = self.b.clone();
        for j in 0..self.nc {
            if self.state[j] != State::Basic {
                let v = self.value(j);
                if v != 0.0 {
                    if j < self.n {
                        for &(i, a) in &self.a_cols[j] {
                            rhs[i] -= a * v;
                        }
                    } else {
                        rhs[j - self.n] -= v;
                    }
                }
            }
        }
        let mut beta = vec![0.0; self.m];
        self.factor.ftran(&mut rhs, &mut beta);
        self.beta = beta;
    }

    /// Put every nonbasic column at the bound its reduced cost prefers.
    fn fix_nonbasic_states(&mut self) {
        for j in 0..self.nc {
            let s = self.state[j];
            if s == State::Basic {
                continue;
            }
            let (lo, hi) = (self.lower[j], self.upper[j]);
            let want = if self.d[j] > DUAL_TOL {
                State::Lower
            } else if self.d[j] < -DUAL_TOL {
                State::Upper
            } else {
                s
            };
            let finite = |st: State| match st {
                State::Lower => lo.is_finite(),
                _ => hi.is_finite(),
            };
            self.state[j] = if finite(want) {
                want
            } else if finite(s) {
                s
            } else {
                self.nonbasic_state(j)
            };
        }
    }

    pub fn solve(&mut self) -> LpStatus {
        if self.trivially_infeasible {
            return LpStatus::Infeasible;
        }
        let mut last = LpStatus::IterationLimit;
        for attempt in 0..3 {
            match attempt {
                0 => {}
                1 => self.refactor(),
                _ => self.reset_to_slack_basis(),
            }
            self.shift.fill(0.0);
            self.recompute_duals();
            self.fix_nonbasic_states();
            self.perturb_costs();
            self.recompute_primal();
            let mut res = self.iterate();
            if let Outcome::Optimal = res {
                // Drop the perturbation and re-optimize from the perturbed optimum.
                self.shift.fill(0.0);
                self.recompute_duals();
                self.fix_nonbasic_states();
                self.recompute_primal();
                res = self.iterate();
            }
            match res {
                Outcome::Optimal => {
                    last = LpStatus::Optimal;
                    if self.certify_optimal() {
                        return last;
                    }
                }
                Outcome::Infeasible(r) => {
                    last = LpStatus::Infeasible;
                    if self.certify_infeasible(r) {
                        return last;
                    }
                }
                Outcome::IterationLimit => last = LpStatus::IterationLimit,
            }
        }
        last
    }

    /// Push each nonbasic reduced cost a little further onto its feasible
    /// side so that ties between ratios become rare. The shift is a fixed
    /// pseudo-random amount per column.
    fn perturb_costs(&mut self) {
        let scale = PERTURBATION * (1.0 + self.cost.iter().fold(0.0f64, |a, c| a.max(c.abs())));
        for j in 0..self.nc {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo == hi {
                continue;
            }
            let u = (j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11;
            let eps = scale * (1.0 + u as f64 / (1u64 << 53) as f64);
            let target = match self.state[j] {
                State::Lower => self.d[j].max(0.0) + eps,
                State::Upper => self.d[j].min(0.0) - eps,
                State::Basic => continue,
            };
            self.shift[j] += target - self.d[j];
            self.d[j] = target;
        }
    }

    fn iterate(&mut self) -> Outcome {
        let (m, nc) = (self.m, self.nc);
        let limit = 50 * (m + nc) as u64 + 1000;
        let mut done = 0u64;
        let mut streak = 0u32;
        let mut bland = false;
        let mut rechecks = 0u32;
        // Rows whose tiny violation admits no entering column are left to
        // the final certificate check.
        let mut noise = vec![false; m];
        let mut unit = vec![0.0; m];
        let mut rho = vec![0.0; m];
        let mut prow = vec![0.0; nc];
        let mut acol = vec![0.0; m];
        let mut col = vec![0.0; m];
        let mut tau = vec![0.0; m];
        loop {
            if done >= limit {
                return Outcome::IterationLimit;
            }
            // Leaving row: largest scaled violation, or lowest column index under Bland.
            let mut leave: Option<(usize, f64, f64)> = None;
            for i in (0..m).filter(|&i| !noise[i]) {
                let q = self.head[i];
                let v = self.beta[i];
                let infeas = if v < self.lower[q] - PRIMAL_TOL {
                    self.lower[q] - v
                } else if v > self.upper[q] + PRIMAL_TOL {
                    v - self.upper[q]
                } else {
                    continue;
                };
                let score = infeas * infeas / self.weight[i];
                let better = match leave {
                    None => true,
                    Some((r, _, best)) => {
                        if bland {
                            q < self.head[r]
                        } else {
                            score > best
                        }
                    }
                };
                if better {
                    leave = Some((i, infeas, score));
                }
            }
            let Some((r, infeas, _)) = leave else {
                return Outcome::Optimal;
            };
            let leaving = self.head[r];
            let to_lower = self.beta[r] < self.lower[leaving];
            let target = if to_lower { self.lower[leaving] } else { self.upper[leaving] };
            let sign = if to_lower { 1.0 } else { -1.0 };

            unit.fill(0.0);
            unit[r] = 1.0;
            self.factor.btran(&mut unit, &mut rho);
            self.weight[r] = rho.iter().map(|v| v * v).sum::<f64>().max(1e-12);
            self.row_times_matrix(&rho, &mut prow);

            let Some(q) = self.ratio_test(&prow, sign, bland) else {
                if infeas <= FEAS_TOL {
                    noise[r] = true;
                    continue;
                }
                return Outcome::Infeasible(r);
            };

            acol.fill(0.0);
            if q < self.n {
                for &(i, a) in &self.a_cols[q] {
                    acol[i] = a;
                }
            } else {
                acol[q - self.n] = 1.0;
            }
            self.factor.ftran(&mut acol, &mut col);
            let alpha_q = col[r];
            if (alpha_q - prow[q]).abs() > 1e-7 * (1.0 + alpha_q.abs()) && rechecks < 5 {
                // Row and column disagree on the pivot: refresh and retry.
                rechecks += 1;
                self.refactor();
                self.recompute_primal();
                self.recompute_duals();
                continue;
            }
            rechecks = 0;

            tau.copy_from_slice(&rho);
            let mut dse = vec![0.0; m];
            self.factor.ftran(&mut tau, &mut dse);

            // A reduced cost on the wrong side of zero is noise; step as if it were zero.
            let dq = if self.dual_slack(q) == 0.0 { 0.0 } else { self.d[q] };
            let theta_d = dq / prow[q];
            if theta_d.abs() < 1e-12 {
                streak += 1;
                if streak > BLAND_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }

            // Primal step: the entering column moves until the leaving one hits `target`.
            let delta = (self.beta[r] - target) / alpha_q;
            let entering_value = self.value(q) + delta;
            for (b, &t) in self.beta.iter_mut().zip(&col) {
                if t != 0.0 {
                    *b -= t * delta;
                }
            }
            self.beta[r] = entering_value;

            if theta_d != 0.0 {
                for (j, &v) in prow.iter().enumerate() {
                    if v != 0.0 && self.state[j] != State::Basic {
                        let x = self.d[j] - theta_d * v;
                        self.d[j] = if x.abs() < DUAL_DROP { 0.0 } else { x };
                    }
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            let wr = self.weight[r];
            for i in 0..m {
                if i != r && col[i] != 0.0 {
                    let k = col[i] / alpha_q;
                    self.weight[i] = (self.weight[i] - 2.0 * k * dse[i] + k * k * wr).max(1e-12);
                }
            }
            self.weight[r] = (wr / (alpha_q * alpha_q)).max(1e-12);

            self.state[leaving] = if to_lower { State::Lower } else { State::Upper };
            self.pos[leaving] = usize::MAX;
            self.state[q] = State::Basic;
            self.pos[q] = r;
            self.head[r] = q;
            self.factor.update(r, &col);
            self.iterations += 1;
            done += 1;

            if self.factor.eta_count() >= REFACTOR_EVERY {
                self.refactor();
                self.recompute_primal();
                self.recompute_duals();
            }
        }
    }

    /// How far `d_j` is from losing dual feasibility; zero when on the wrong side.
    fn dual_slack(&self, j: usize) -> f64 {
        match self.state[j] {
            State::Lower => self.d[j].max(0.0),
            State::Upper => (-self.d[j]).max(0.0),
            State::Basic => 0.0,
        }
    }

    /// Entering column for the pivot row `row`; `sign` is +1 when the
    /// leaving basic value must increase. Harris two-pass selection, or
    /// lowest index among the minimum ratios under Bland's rule.
    fn ratio_test(&self, row: &[f64], sign: f64, bland: bool) -> Option<usize> {
        let nc = self.nc;
        let eligible = |j: usize| -> Option<f64> {
            let alpha = row[j];
            if alpha.abs() <= PIVOT_TOL || self.lower[j] == self.upper[j] {
                return None;
            }
            match self.state[j] {
                State::Lower if sign * alpha < 0.0 => Some(alpha),
                State::Upper if sign * alpha > 0.0 => Some(alpha),
                _ => None,
            }
        };
        if bland {
            // Lowest index among the minimum ratios, skipping pivots much
            // smaller than the largest tied one.
            let mut min_ratio = f64::INFINITY;
            for j in 0..nc {
                if let Some(alpha) = eligible(j) {
                    min_ratio = min_ratio.min(self.dual_slack(j) / alpha.abs());
                }
            }
            if !min_ratio.is_finite() {
                return None;
            }
            let tied = |j: usize| eligible(j).filter(|a| self.dual_slack(j) / a.abs() <= min_ratio + 1e-12);
            let biggest = (0..nc).filter_map(tied).fold(0.0f64, |m, a| m.max(a.abs()));
            return (0..nc).find(|&j| tied(j).is_some_and(|a| a.abs() >= 1e-2 * biggest));
        }
        let mut bound = f64::INFINITY;
        for j in 0..nc {
            if let Some(alpha) = eligible(j) {
                bound = bound.min((self.dual_slack(j) + DUAL_TOL) / alpha.abs());
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..nc {
            if let Some(alpha) = eligible(j) {
                if self.dual_slack(j) / alpha.abs() <= bound && best.is_none_or(|(_, a)| alpha.abs() > a) {
                    best = Some((j, alpha.abs()));
                }
            }
        }
        best.map(|b| b.0)
    }

    fn certify_optimal(&self) -> bool {
        let x = self.primal();
        for (j, &v) in x.iter().enumerate() {
            if v < self.lower[j] - FEAS_TOL || v > self.upper[j] + FEAS_TOL {
                return false;
            }
        }
        for (i, row) in self.a_rows.iter().enumerate() {
            let activity: f64 = row.iter().map(|&(j, a)| a * x[j]).sum();
            let s = self.b[i] - activity;
            if s < self.lower[self.n + i] - FEAS_TOL || s > self.upper[self.n + i] + FEAS_TOL {
                return false;
            }
        }
        let n = self.n;
        let y = self.duals(|q| self.cost[q]);
        let scale = 1.0 + self.cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let tol = FEAS_TOL * scale;
        let sign_ok = |j: usize, dj: f64| {
            if self.lower[j] == self.upper[j] {
                return true;
            }
            match self.state[j] {
                State::Basic => dj.abs() <= tol,
                State::Lower => dj >= -tol,
                State::Upper => dj <= tol,
            }
        };
        (0..n).all(|j| {
            let dj = self.cost[j] - self.a_cols[j].iter().map(|&(k, a)| y[k] * a).sum::<f64>();
            sign_ok(j, dj)
        }) && (0..self.m).all(|k| sign_ok(n + k, -y[k]))
    }

    /// Check that row `r` of `B⁻¹` combines the original rows into an
    /// equation no point in the bounds can satisfy.
    fn certify_infeasible(&self, r: usize) -> bool {
        let n = self.n;
        let mut unit = vec![0.0; self.m];
        unit[r] = 1.0;
        let mut rho = vec![0.0; self.m];
        self.factor.btran(&mut unit, &mut rho);
        let rhs: f64 = rho.iter().zip(&self.b).map(|(a, b)| a * b).sum();
        let mut lo = 0.0;
        let mut hi = 0.0;
        let mut add = |g: f64, l: f64, u: f64| {
            if g > 0.0 {
                lo += g * l;
                hi += g * u;
            } else if g < 0.0 {
                lo += g * u;
                hi += g * l;
            }
        };
        for j in 0..n {
            let g: f64 = self.a_cols[j].iter().map(|&(k, a)| rho[k] * a).sum();
            add(g, self.lower[j], self.upper[j]);
        }
        for (k, &g) in rho.iter().enumerate() {
            add(g, self.lower[n + k], self.upper[n + k]);
        }
        let tol = FEAS_TOL * (1.0 + rhs.abs());
        rhs < lo - tol || rhs > hi + tol
    }
}
