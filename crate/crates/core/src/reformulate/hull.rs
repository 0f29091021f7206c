use super::{exactly_one, skeleton, ReformError};
use crate::gdp::{canonicalize_disjunction, Col, GdpModel, LinRow, MilpModel, Pass, RowOrigin};

/// Disaggregated hull reformulation.
///
/// Only variables that occur in a disjunction are disaggregated for it; a
/// variable with all-zero coefficients would only contribute vacuous rows.
/// Each copy `x̂` gets the box `[min(lo, 0), max(hi, 0)]` and is tied to its
/// indicator by `lo·y ≤ x̂ ≤ hi·y`.
pub fn reformulate_hull(model: &GdpModel) -> Result<MilpModel, ReformError> {
    let (mut milp, layout) = skeleton(model, Pass::Hull)?;
    for (k, disj) in model.disjunctions.iter().enumerate() {
        let canon = canonicalize_disjunction(disj);
        let vars = canon.vars();
        let mut copies: Vec<Vec<Col>> = vec![Vec::with_capacity(canon.disjuncts.len()); vars.len()];
        for (j, d) in canon.disjuncts.iter().enumerate() {
            let y = layout.y(d.indicator);
            let hat: Vec<Col> = vars
                .iter()
                .map(|&v| {
                    let var = model.var(v);
                    milp.add_continuous(
                        format!("{}_hat_{k}_{j}", var.name),
                        var.lower.min(0.0),
                        var.upper.max(0.0),
                    )
                })
                .collect();
            let hat_of = |v| hat[vars.binary_search(&v).expect("variable occurs in disjunction")];
            for (r, row) in d.rows.iter().enumerate() {
                let terms = row.terms().iter().map(|&(v, a)| (hat_of(v), a)).chain([(y, -row.rhs)]);
                milp.add_row(LinRow::le(terms, 0.0), RowOrigin::HullDisjunct { disjunction: k, disjunct: j, row: r });
            }
            for (i, &v) in vars.iter().enumerate() {
                let var = model.var(v);
                milp.add_row(
                    LinRow::le([(hat[i], -1.0), (y, var.lower)], 0.0),
                    RowOrigin::HullLower { disjunction: k, disjunct: j, var: v.0 },
                );
                milp.add_row(
                    LinRow::le([(hat[i], 1.0), (y, -var.upper)], 0.0),
                    RowOrigin::HullUpper { disjunction: k, disjunct: j, var: v.0 },
                );
                copies[i].push(hat[i]);
            }
        }
        for (i, &v) in vars.iter().enumerate() {
            let terms = [(layout.x(v), 1.0)].into_iter().chain(copies[i].iter().map(|&c| (c, -1.0)));
            milp.add_row(LinRow::eq(terms, 0.0), RowOrigin::HullAggregation { disjunction: k, var: v.0 });
        }
        exactly_one(&mut milp, layout, k, disj);
    }
    Ok(milp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reformulate::tests::two_interval;

    #[test]
    fn interval_union_rows() {
        let milp = reformulate_hull(&two_interval()).unwrap();
        let (x, y1, y2) = (Col(0), Col(1), Col(2));
        let h1 = milp.col_by_name("x_hat_0_0").unwrap();
        let h2 = milp.col_by_name("x_hat_0_1").unwrap();
        assert_eq!(milp.continuous_count(), 3);
        assert_eq!((milp.vars[h1.0].lower, milp.vars[h1.0].upper), (0.0, 10.0));
        let rows: Vec<_> = milp.rows.iter().map(|r| r.row.clone()).collect();
        for expected in [
            LinRow::le([(h1, 1.0), (y1, -2.0)], 0.0),
            LinRow::le([(h2, -1.0), (y2, 5.0)], 0.0),
            LinRow::le([(h1, 1.0), (y1, -10.0)], 0.0),
            LinRow::le([(h2, 1.0), (y2, -10.0)], 0.0),
            LinRow::le([(h1, -1.0)], 0.0),
            LinRow::eq([(x, 1.0), (h1, -1.0), (h2, -1.0)], 0.0),
            LinRow::eq([(y1, 1.0), (y2, 1.0)], 1.0),
        ] {
            assert!(rows.contains(&expected), "missing {expected:?}");
        }
    }

    #[test]
    fn every_row_is_tagged_with_the_pass() {
        let milp = reformulate_hull(&two_interval()).unwrap();
        assert!(milp.rows.iter().all(|r| r.tag.pass == Pass::Hull));
    }
}
