//! LP relaxations and LP-based branch and bound for [`MilpModel`]s.

mod bb;
mod lu;
mod simplex;

pub use bb::{solve_bb, BbConfig, SolveResult, SolveStatus, GAP_FLOOR, INT_TOL};
pub use simplex::{LpStatus, BLAND_STREAK, FEAS_TOL};

use crate::gdp::{Col, MilpModel};
use simplex::DualSimplex;

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    /// Objective at `x`; meaningful only when optimal.
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: u64,
}

/// Solve the continuous relaxation (binaries in `[0, 1]`), with optional
/// per-column bound overrides `(col, lower, upper)`.
pub fn solve_lp(model: &MilpModel, overrides: &[(Col, f64, f64)]) -> LpResult {
    let mut lp = DualSimplex::new(model);
    for &(c, lo, hi) in overrides {
        lp.set_bounds(c.0, lo, hi);
    }
    let status = lp.solve();
    let x = lp.primal();
    LpResult { status, objective: lp.objective(&x), x, iterations: lp.iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdp::{LinRow, Pass, RowOrigin};

    fn model(rows: Vec<LinRow<Col>>, bounds: &[(f64, f64)], obj: &[f64]) -> MilpModel {
        let mut m = MilpModel::new("t", Pass::BigM);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            m.add_continuous(format!("x{i}"), lo, hi);
        }
        for (index, r) in rows.into_iter().enumerate() {
            m.add_row(r, RowOrigin::Global { index });
        }
        m.objective = obj.iter().enumerate().map(|(i, &c)| (Col(i), c)).collect();
        m
    }

    #[test]
    fn two_variable_lp() {
        // max x + y s.t. x + 2y ≤ 4, 3x + y ≤ 6, box [0, 10]² → (1.6, 1.2)
        let m = model(
            vec![LinRow::le([(Col(0), 1.0), (Col(1), 2.0)], 4.0), LinRow::le([(Col(0), 3.0), (Col(1), 1.0)], 6.0)],
            &[(0.0, 10.0), (0.0, 10.0)],
            &[-1.0, -1.0],
        );
        let r = solve_lp(&m, &[]);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 2.8).abs() < 1e-9);
        assert!((r.x[0] - 1.6).abs() < 1e-9 && (r.x[1] - 1.2).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x − y s.t. x + y = 3, x ≥ 1 (as a row), box [0, 5]²
        let m = model(
            vec![LinRow::eq([(Col(0), 1.0), (Col(1), 1.0)], 3.0), LinRow::ge([(Col(0), 1.0)], 1.0)],
            &[(0.0, 5.0), (0.0, 5.0)],
            &[1.0, -1.0],
        );
        let r = solve_lp(&m, &[]);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_lp() {
        let m = model(
            vec![LinRow::ge([(Col(0), 1.0), (Col(1), 1.0)], 5.0), LinRow::le([(Col(0), 1.0)], 1.0)],
            &[(0.0, 2.0), (0.0, 2.0)],
            &[1.0, 1.0],
        );
        assert_eq!(solve_lp(&m, &[]).status, LpStatus::Infeasible);
    }

    #[test]
    fn overrides_fix_columns() {
        let m = model(vec![LinRow::le([(Col(0), 1.0), (Col(1), 1.0)], 4.0)], &[(0.0, 3.0), (0.0, 3.0)], &[-1.0, -2.0]);
        let r = solve_lp(&m, &[(Col(1), 0.5, 0.5)]);
        assert!((r.objective + 4.0).abs() < 1e-9);
        assert_eq!(r.x[1], 0.5);
    }

    #[test]
    fn degenerate_vertex() {
        // Several rows through the optimum (1, 1).
        let rows = vec![
            LinRow::le([(Col(0), 1.0), (Col(1), 1.0)], 2.0),
            LinRow::le([(Col(0), 1.0)], 1.0),
            LinRow::le([(Col(1), 1.0)], 1.0),
            LinRow::le([(Col(0), 2.0), (Col(1), 1.0)], 3.0),
            LinRow::le([(Col(0), 1.0), (Col(1), 2.0)], 3.0),
        ];
        let m = model(rows, &[(0.0, 4.0), (0.0, 4.0)], &[-1.0, -1.0]);
        let r = solve_lp(&m, &[]);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 2.0).abs() < 1e-9);
    }
}
