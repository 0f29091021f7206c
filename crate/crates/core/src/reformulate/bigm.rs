use super::{exactly_one, interval_max, skeleton, ReformError};
use crate::gdp::{canonicalize_disjunction, ContinuousVar, GdpModel, LinRow, MilpModel, Pass, RowOrigin, Sense};

/// Largest violation `max (a·x − b)` of a `≤` row over the variable box.
///
/// May be negative for a row the box never violates; the Big-M pass clamps
/// it at zero.
pub fn big_m_bound(row: &LinRow, boxes: &[ContinuousVar]) -> Result<f64, ReformError> {
    if row.sense != Sense::Le {
        return Err(ReformError::NotCanonical);
    }
    for &(v, _) in row.terms() {
        let b = &boxes[v.0];
        if !b.lower.is_finite() || !b.upper.is_finite() {
            return Err(ReformError::InfiniteBox(v.0));
        }
    }
    Ok(interval_max(row.terms(), boxes) - row.rhs)
}

/// `a·x − b ≤ M·(1 − y)` for every disjunct row, with `M` the clamped
/// interval bound. Adds no continuous variables.
pub fn reformulate_bigm(model: &GdpModel) -> Result<MilpModel, ReformError> {
    let (mut milp, layout) = skeleton(model, Pass::BigM)?;
    for (k, disj) in model.disjunctions.iter().enumerate() {
        let canon = canonicalize_disjunction(disj);
        for (j, d) in canon.disjuncts.iter().enumerate() {
            let y = layout.y(d.indicator);
            for (r, row) in d.rows.iter().enumerate() {
                let m = big_m_bound(row, &model.vars)?.max(0.0);
                let terms = row.terms().iter().map(|&(v, a)| (layout.x(v), a)).chain([(y, m)]);
                milp.add_row(
                    LinRow::le(terms, row.rhs + m),
                    RowOrigin::BigM { disjunction: k, disjunct: j, row: r },
                );
            }
        }
        exactly_one(&mut milp, layout, k, disj);
    }
    Ok(milp)
}

#[cfg(test)]
mod tests {
    use itertools::Itertools;

    use super::*;
    use crate::gdp::{Col, VarId};
    use crate::reformulate::tests::two_interval;

    fn boxes(b: &[(f64, f64)]) -> Vec<ContinuousVar> {
        b.iter().map(|&(lower, upper)| ContinuousVar { name: String::new(), lower, upper }).collect()
    }

    /// Max of `a·x − b` over the box corners, independent of the interval rule.
    fn corner_max(row: &LinRow, bx: &[ContinuousVar]) -> f64 {
        let n = bx.len();
        (0..n)
            .map(|i| [bx[i].lower, bx[i].upper])
            .multi_cartesian_product()
            .map(|x| row.lhs(|v| x[v.0]) - row.rhs)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn difference_row() {
        let bx = boxes(&[(0.0, 10.0), (0.0, 10.0)]);
        let row = LinRow::le([(VarId(0), 1.0), (VarId(1), -1.0)], -2.0);
        assert_eq!(big_m_bound(&row, &bx).unwrap(), 12.0);
    }

    #[test]
    fn slack_row_is_negative() {
        let bx = boxes(&[(0.0, 4.0)]);
        assert_eq!(big_m_bound(&LinRow::le([(VarId(0), 1.0)], 5.0), &bx).unwrap(), -1.0);
    }

    #[test]
    fn precedence_row_matches_corner_enumeration() {
        let bx = boxes(&[(0.0, 20.0), (0.0, 20.0)]);
        let row = LinRow::le([(VarId(0), 1.0), (VarId(1), -1.0)], -3.0);
        let oracle = corner_max(&row, &bx);
        assert_eq!(oracle, 23.0);
        assert_eq!(big_m_bound(&row, &bx).unwrap(), oracle);
    }

    #[test]
    fn infinite_box_is_an_error() {
        let bx = boxes(&[(0.0, f64::INFINITY)]);
        assert!(matches!(big_m_bound(&LinRow::le([(VarId(0), 1.0)], 1.0), &bx), Err(ReformError::InfiniteBox(0))));
    }

    #[test]
    fn interval_union_rows() {
        let milp = reformulate_bigm(&two_interval()).unwrap();
        let (x, y1, y2) = (Col(0), Col(1), Col(2));
        assert_eq!(milp.continuous_count(), 1);
        let rows: Vec<_> = milp.rows.iter().map(|r| r.row.clone()).collect();
        // x ≤ 2 + 8(1 − y1)  and  −x ≤ −5 + 5(1 − y2)
        assert!(rows.contains(&LinRow::le([(x, 1.0), (y1, 8.0)], 10.0)));
        assert!(rows.contains(&LinRow::le([(x, -1.0), (y2, 5.0)], 0.0)));
        assert!(rows.contains(&LinRow::eq([(y1, 1.0), (y2, 1.0)], 1.0)));
        assert_eq!(rows.len(), 3);
    }

    #[test]
    fn no_disjunctions_copies_globals() {
        let mut m = GdpModel::new("lp");
        let x = m.add_var("x", 0.0, 5.0);
        m.add_global(LinRow::ge([(x, 1.0)], 1.0));
        m.set_objective([(x, 1.0)]);
        let milp = reformulate_bigm(&m).unwrap();
        assert_eq!(milp.rows.len(), 1);
        assert_eq!(milp.binary_count(), 0);
        assert_eq!(milp.rows[0].row, LinRow::ge([(Col(0), 1.0)], 1.0));
    }
}
