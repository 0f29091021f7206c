use super::{exactly_one, shared_lhs, skeleton, tighten_disjunction, ReformError};
use crate::gdp::{canonicalize_disjunction, GdpModel, LinRow, MilpModel, Pass, RowOrigin};

/// Reaggregated hull: one row `A_k·x ≤ Σ_j b_jk·y_jk` per shared coefficient
/// vector, in the original variables.
///
/// Without `auto_align` every disjunction must already share its left-hand
/// side across disjuncts, and its rows are aggregated as written. With
/// `auto_align` each disjunction first goes through
/// [`tighten_disjunction`]; indicators of disjuncts that are empty inside
/// the box are fixed to 0.
pub fn reformulate_rhr(model: &GdpModel, auto_align: bool) -> Result<MilpModel, ReformError> {
    let (mut milp, layout) = skeleton(model, Pass::ReaggregatedHull)?;
    for (k, disj) in model.disjunctions.iter().enumerate() {
        let d = if auto_align {
            let t = tighten_disjunction(disj, &model.vars);
            for (dj, _) in t.disjunction.disjuncts.iter().zip(&t.empty).filter(|(_, &e)| e) {
                milp.vars[layout.y(dj.indicator).0].upper = 0.0;
            }
            t.disjunction
        } else {
            canonicalize_disjunction(disj)
        };
        if !shared_lhs(&d) {
            return Err(ReformError::SharedLhsViolation { index: k, name: disj.name.clone() });
        }
        let lhs = &d.disjuncts[0].rows;
        for (r, row) in lhs.iter().enumerate() {
            let x_terms = row.terms().iter().map(|&(v, a)| (layout.x(v), a));
            let y_terms = d.disjuncts.iter().map(|dj| (layout.y(dj.indicator), -dj.rows[r].rhs));
            milp.add_row(LinRow::le(x_terms.chain(y_terms), 0.0), RowOrigin::Reaggregated { disjunction: k, row: r });
        }
        exactly_one(&mut milp, layout, k, disj);
    }
    Ok(milp)
}
