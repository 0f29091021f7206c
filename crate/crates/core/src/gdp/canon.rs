use std::cmp::Ordering;

use super::{Disjunct, Disjunction, LinRow, Sense};

/// Total order on sparse coefficient vectors: lexicographic over
/// `(variable, coefficient)` pairs, shorter prefix first.
pub fn cmp_terms<V: Ord>(a: &[(V, f64)], b: &[(V, f64)]) -> Ordering {
    for ((va, ca), (vb, cb)) in a.iter().zip(b) {
        let ord = va.cmp(vb).then_with(|| ca.total_cmp(cb));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

/// Rewrite every row of a disjunct in `≤` form and sort the rows.
///
/// `≥` rows are negated and `=` rows become a pair of `≤` rows. Rows are
/// ordered by coefficient vector, ties by right-hand side.
pub fn canonicalize_rows(disjunct: &Disjunct) -> Disjunct {
    let mut rows = Vec::with_capacity(disjunct.rows.len());
    for row in &disjunct.rows {
        match row.sense {
            Sense::Le => rows.push(row.clone()),
            Sense::Ge => rows.push(row.negated()),
            Sense::Eq => {
                rows.push(LinRow::le(row.terms().iter().copied(), row.rhs));
                rows.push(LinRow::le(row.terms().iter().map(|&(v, a)| (v, -a)), -row.rhs));
            }
        }
    }
    rows.sort_by(|a, b| cmp_terms(a.terms(), b.terms()).then_with(|| a.rhs.total_cmp(&b.rhs)));
    Disjunct { indicator: disjunct.indicator, rows }
}

pub fn canonicalize_disjunction(disjunction: &Disjunction) -> Disjunction {
    Disjunction {
        name: disjunction.name.clone(),
        disjuncts: disjunction.disjuncts.iter().map(canonicalize_rows).collect(),
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::gdp::{BoolId, VarId};

    fn disjunct(rows: Vec<LinRow>) -> Disjunct {
        Disjunct { indicator: BoolId(0), rows }
    }

    #[test]
    fn ge_row_is_negated() {
        let (xi, xj) = (VarId(0), VarId(1));
        let d = canonicalize_rows(&disjunct(vec![LinRow::ge([(xj, 1.0), (xi, -1.0)], 3.0)]));
        assert_eq!(d.rows, vec![LinRow::le([(xi, 1.0), (xj, -1.0)], -3.0)]);
    }

    #[test]
    fn equality_is_split() {
        let x = VarId(0);
        let d = canonicalize_rows(&disjunct(vec![LinRow::eq([(x, 1.0)], 3.0)]));
        assert_eq!(d.rows.len(), 2);
        assert!(d.rows.contains(&LinRow::le([(x, 1.0)], 3.0)));
        assert!(d.rows.contains(&LinRow::le([(x, -1.0)], -3.0)));
    }

    #[test]
    fn canonical_disjunct_is_fixed_point() {
        let x = VarId(0);
        let d = canonicalize_rows(&disjunct(vec![LinRow::le([(x, 1.0)], 2.0), LinRow::le([(x, -1.0)], 0.0)]));
        assert_eq!(canonicalize_rows(&d), d);
    }

    fn arb_row() -> impl Strategy<Value = LinRow> {
        (
            prop::collection::vec((0usize..3, -3i32..=3), 1..4),
            prop_oneof![Just(Sense::Le), Just(Sense::Ge), Just(Sense::Eq)],
            -5i32..=5,
        )
            .prop_map(|(terms, sense, rhs)| {
                LinRow::new(terms.into_iter().map(|(v, a)| (VarId(v), a as f64)), sense, rhs as f64)
            })
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent_and_preserves_feasible_set(
            rows in prop::collection::vec(arb_row(), 1..5),
            points in prop::collection::vec(prop::collection::vec(-4i32..=4, 3), 20),
        ) {
            let d = disjunct(rows);
            let c = canonicalize_rows(&d);
            prop_assert!(c.rows.iter().all(|r| r.sense == Sense::Le));
            prop_assert_eq!(canonicalize_rows(&c), c.clone());
            for p in points {
                let val = |v: VarId| p[v.0] as f64;
                let before = d.rows.iter().all(|r| r.violation(val) == 0.0);
                let after = c.rows.iter().all(|r| r.violation(val) == 0.0);
                prop_assert_eq!(before, after);
            }
        }
    }
}
