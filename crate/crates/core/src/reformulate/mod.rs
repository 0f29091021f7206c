//! Lowering passes from [`GdpModel`] to [`MilpModel`].
//!
//! All passes share one column layout: the model's continuous variables keep
//! their indices, followed by one binary per indicator. The hull pass appends
//! its disaggregated copies after that.

mod bigm;
mod hull;
mod rhr;

use thiserror::Error;

use crate::gdp::{
    canonicalize_disjunction, cmp_terms, validate, BoolId, Col, ContinuousVar, Diagnostic, Disjunct,
    Disjunction, GdpModel, LinRow, LogicSense, MilpModel, Pass, RowOrigin, Sense, VarId,
};
use crate::milp::{solve_lp, LpStatus};

pub use bigm::{big_m_bound, reformulate_bigm};
pub use hull::reformulate_hull;
pub use rhr::reformulate_rhr;

#[derive(Debug, Error)]
pub enum ReformError {
    #[error("model failed validation: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("row is not in canonical <= form")]
    NotCanonical,
    #[error("variable #{0} has an infinite box")]
    InfiniteBox(usize),
    #[error("disjunction {index} ({name}) has disjuncts with different left-hand sides")]
    SharedLhsViolation { index: usize, name: String },
}

/// Run the named pass. `auto_align` only affects the reaggregated hull.
pub fn reformulate(model: &GdpModel, pass: Pass, auto_align: bool) -> Result<MilpModel, ReformError> {
    match pass {
        Pass::BigM => reformulate_bigm(model),
        Pass::Hull => reformulate_hull(model),
        Pass::ReaggregatedHull => reformulate_rhr(model, auto_align),
    }
}

#[derive(Clone, Copy)]
pub(crate) struct Layout {
    n_vars: usize,
}

impl Layout {
    pub(crate) fn x(&self, v: VarId) -> Col {
        Col(v.0)
    }

    pub(crate) fn y(&self, b: BoolId) -> Col {
        Col(self.n_vars + b.0)
    }

    pub(crate) fn row(&self, row: &LinRow) -> LinRow<Col> {
        LinRow::new(row.terms().iter().map(|&(v, a)| (self.x(v), a)), row.sense, row.rhs)
    }
}

/// Validated copy of everything a pass does not rewrite: boxes, binaries,
/// globals, logic and objective.
pub(crate) fn skeleton(model: &GdpModel, pass: Pass) -> Result<(MilpModel, Layout), ReformError> {
    let diags = validate(model);
    if !diags.is_empty() {
        return Err(ReformError::Invalid(diags));
    }
    let layout = Layout { n_vars: model.vars.len() };
    let mut milp = MilpModel::new(format!("{}_{}", model.name, pass), pass);
    for v in &model.vars {
        milp.add_continuous(v.name.clone(), v.lower, v.upper);
    }
    for b in &model.bools {
        milp.add_binary(b.clone());
    }
    for (index, row) in model.globals.iter().enumerate() {
        milp.add_row(layout.row(row), RowOrigin::Global { index });
    }
    for (index, row) in model.logic.iter().enumerate() {
        let sense = match row.sense {
            LogicSense::Le => Sense::Le,
            LogicSense::Eq => Sense::Eq,
        };
        let terms = row.terms.iter().map(|&(b, c)| (layout.y(b), c as f64));
        milp.add_row(LinRow::new(terms, sense, row.rhs as f64), RowOrigin::Logic { index });
    }
    milp.objective = model.objective.iter().map(|&(v, c)| (layout.x(v), c)).collect();
    Ok((milp, layout))
}

pub(crate) fn exactly_one(milp: &mut MilpModel, layout: Layout, k: usize, disj: &Disjunction) {
    let row = LinRow::eq(disj.disjuncts.iter().map(|d| (layout.y(d.indicator), 1.0)), 1.0);
    milp.add_row(row, RowOrigin::ExactlyOne { disjunction: k });
}

/// Maximum of `Σ a_v·v` over the variable box.
pub(crate) fn interval_max(terms: &[(VarId, f64)], boxes: &[ContinuousVar]) -> f64 {
    terms
        .iter()
        .map(|&(v, a)| {
            let b = &boxes[v.0];
            if a > 0.0 {
                a * b.upper
            } else {
                a * b.lower
            }
        })
        .sum()
}

/// Whether every disjunct, after canonicalization, has the same list of
/// coefficient vectors. Comparison is exact; rescaled rows do not match.
pub fn shared_lhs(disjunction: &Disjunction) -> bool {
    let canon = canonicalize_disjunction(disjunction);
    let Some(first) = canon.disjuncts.first() else {
        return true;
    };
    canon.disjuncts.iter().all(|d| {
        d.rows.len() == first.rows.len() && d.rows.iter().zip(&first.rows).all(|(a, b)| a.terms() == b.terms())
    })
}

/// Give every disjunct the same coefficient vectors without changing any
/// disjunct's feasible set inside the box.
///
/// A disjunct missing a vector receives it with the box maximum as its
/// right-hand side; one that already has it keeps the smaller of its own
/// right-hand side and the box maximum. Rows come out in canonical order.
pub fn align_disjunction(disjunction: &Disjunction, boxes: &[ContinuousVar]) -> Disjunction {
    let canon = canonicalize_disjunction(disjunction);
    let mut vectors: Vec<&[(VarId, f64)]> =
        canon.disjuncts.iter().flat_map(|d| d.rows.iter().map(|r| r.terms())).collect();
    vectors.sort_by(|a, b| cmp_terms(a, b));
    vectors.dedup();

    let disjuncts = canon
        .disjuncts
        .iter()
        .map(|d| {
            let rows = vectors
                .iter()
                .map(|&terms| {
                    let rhs = d
                        .rows
                        .iter()
                        .filter(|r| r.terms() == terms)
                        .map(|r| r.rhs)
                        .fold(interval_max(terms, boxes), f64::min);
                    LinRow::le(terms.iter().copied(), rhs)
                })
                .collect();
            Disjunct { indicator: d.indicator, rows }
        })
        .collect();
    Disjunction { name: canon.name.clone(), disjuncts }
}

/// A disjunction after [`tighten_disjunction`].
#[derive(Clone, Debug, PartialEq)]
pub struct Tightened {
    pub disjunction: Disjunction,
    /// `empty[j]`: disjunct `j` has no point inside the box.
    pub empty: Vec<bool>,
}

/// Aligned form whose rows describe each disjunct inside the box exactly.
///
/// Every disjunct receives `±v ≤ bound` rows for the variables of the
/// disjunction, then each right-hand side drops to its support value over
/// the disjunct intersected with the box. No disjunct's feasible set inside
/// the box changes. Disjuncts with no point in the box are reported in
/// `empty` and keep their aligned rows.
///
/// Plain alignment can aggregate to something weaker than the hull, since a
/// row that is slack on one disjunct, or an empty disjunct, still puts
/// weight on the aggregated right-hand side. With tight rows over one or
/// two variables the aggregation is exactly the hull within the box. Over
/// more variables a mixture of disjuncts can need facet directions that no
/// disjunct has, so exactness is not guaranteed there.
pub fn tighten_disjunction(disjunction: &Disjunction, boxes: &[ContinuousVar]) -> Tightened {
    let vars = disjunction.vars();
    let mut boxed = disjunction.clone();
    for d in &mut boxed.disjuncts {
        for &v in &vars {
            d.rows.push(LinRow::le([(v, 1.0)], boxes[v.0].upper));
            d.rows.push(LinRow::le([(v, -1.0)], -boxes[v.0].lower));
        }
    }
    let mut aligned = align_disjunction(&boxed, boxes);
    let mut empty = Vec::with_capacity(aligned.disjuncts.len());
    for d in &mut aligned.disjuncts {
        let support = support_values(&d.rows, &vars, boxes);
        empty.push(support.is_none());
        if let Some(s) = support {
            for (row, s) in d.rows.iter_mut().zip(s) {
                *row = row.with_rhs(row.rhs.min(s));
            }
        }
    }
    Tightened { disjunction: aligned, empty }
}

/// `max row·x` over `rows` and the box for every row, or `None` when the
/// rows have no point in the box.
fn support_values(rows: &[LinRow], vars: &[VarId], boxes: &[ContinuousVar]) -> Option<Vec<f64>> {
    let local = |v: VarId| Col(vars.binary_search(&v).expect("row variable belongs to the disjunction"));
    let mut lp = MilpModel::new("support", Pass::Hull);
    for &v in vars {
        lp.add_continuous(boxes[v.0].name.clone(), boxes[v.0].lower, boxes[v.0].upper);
    }
    for (index, row) in rows.iter().enumerate() {
        lp.add_row(
            LinRow::new(row.terms().iter().map(|&(v, a)| (local(v), a)), row.sense, row.rhs),
            RowOrigin::Global { index },
        );
    }
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        lp.objective = row.terms().iter().map(|&(v, a)| (local(v), -a)).collect();
        let r = solve_lp(&lp, &[]);
        let s = match r.status {
            LpStatus::Optimal => -r.objective,
            LpStatus::Infeasible => return None,
            LpStatus::IterationLimit => row.rhs,
        };
        // Snap LP round-off so integer data gives integer bounds.
        out.push(if (s - s.round()).abs() <= 1e-9 * (1.0 + s.abs()) { s.round() } else { s });
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdp::LinRow;

    pub(crate) fn two_interval() -> GdpModel {
        let mut m = GdpModel::new("two_interval");
        let x = m.add_var("x", 0.0, 10.0);
        let y1 = m.add_bool("y1");
        let y2 = m.add_bool("y2");
        m.add_disjunction(
            "d",
            vec![
                Disjunct { indicator: y1, rows: vec![LinRow::le([(x, 1.0)], 2.0)] },
                Disjunct { indicator: y2, rows: vec![LinRow::ge([(x, 1.0)], 5.0)] },
            ],
        );
        m.set_objective([(x, 1.0)]);
        m
    }

    #[test]
    fn unaligned_interval_union_is_not_shared() {
        assert!(!shared_lhs(&two_interval().disjunctions[0]));
    }

    #[test]
    fn align_interval_union() {
        let m = two_interval();
        let x = VarId(0);
        let aligned = align_disjunction(&m.disjunctions[0], &m.vars);
        assert!(shared_lhs(&aligned));
        assert_eq!(aligned.disjuncts[0].rows, vec![LinRow::le([(x, -1.0)], 0.0), LinRow::le([(x, 1.0)], 2.0)]);
        assert_eq!(aligned.disjuncts[1].rows, vec![LinRow::le([(x, -1.0)], -5.0), LinRow::le([(x, 1.0)], 10.0)]);
        assert_eq!(align_disjunction(&aligned, &m.vars), aligned);
    }

    #[test]
    fn align_keeps_tighter_rhs() {
        let mut m = two_interval();
        let x = VarId(0);
        m.disjunctions[0].disjuncts[1].rows.push(LinRow::le([(x, 1.0)], 7.0));
        let aligned = align_disjunction(&m.disjunctions[0], &m.vars);
        assert_eq!(aligned.disjuncts[1].rows[1], LinRow::le([(x, 1.0)], 7.0));
    }

    fn lp_value(model: &GdpModel, pass: Pass, auto_align: bool) -> Option<f64> {
        let r = solve_lp(&reformulate(model, pass, auto_align).unwrap(), &[]);
        (r.status == LpStatus::Optimal).then_some(r.objective)
    }

    /// `x ≥ 12 ∨ x ≤ 3` on `[0, 10]`: the first disjunct is empty.
    fn empty_disjunct() -> GdpModel {
        let mut m = GdpModel::new("empty");
        let x = m.add_var("x", 0.0, 10.0);
        let (a, b) = (m.add_bool("a"), m.add_bool("b"));
        m.add_disjunction(
            "d",
            vec![
                Disjunct { indicator: a, rows: vec![LinRow::ge([(x, 1.0)], 12.0)] },
                Disjunct { indicator: b, rows: vec![LinRow::le([(x, 1.0)], 3.0)] },
            ],
        );
        m.set_objective([(x, -1.0)]);
        m
    }

    #[test]
    fn empty_disjunct_is_fixed_off() {
        let m = empty_disjunct();
        let t = tighten_disjunction(&m.disjunctions[0], &m.vars);
        assert_eq!(t.empty, vec![true, false]);
        let x = VarId(0);
        assert_eq!(t.disjunction.disjuncts[1].rows, vec![LinRow::le([(x, -1.0)], 0.0), LinRow::le([(x, 1.0)], 3.0)]);
        // Plain alignment lets the empty disjunct carry weight: x ≤ 10a + 3b, x ≥ 12a.
        let mut aligned = m.clone();
        aligned.disjunctions[0] = align_disjunction(&m.disjunctions[0], &m.vars);
        assert!((lp_value(&aligned, Pass::ReaggregatedHull, false).unwrap() + 7.2).abs() < 1e-9);
        for (pass, align) in [(Pass::ReaggregatedHull, true), (Pass::Hull, false)] {
            assert!((lp_value(&m, pass, align).unwrap() + 3.0).abs() < 1e-9, "{pass}");
        }
    }

    #[test]
    fn slack_rows_are_tightened() {
        // x + y ≤ 20 is slack on the unit square [0,1]² and drops to 2.
        let mut m = GdpModel::new("slack");
        let x = m.add_var("x", 0.0, 10.0);
        let y = m.add_var("y", 0.0, 10.0);
        let (a, b) = (m.add_bool("a"), m.add_bool("b"));
        m.add_disjunction(
            "d",
            vec![
                Disjunct {
                    indicator: a,
                    rows: vec![LinRow::le([(x, 1.0)], 1.0), LinRow::le([(y, 1.0)], 1.0), LinRow::le([(x, 1.0), (y, 1.0)], 20.0)],
                },
                Disjunct { indicator: b, rows: vec![LinRow::ge([(x, 1.0), (y, 1.0)], 12.0)] },
            ],
        );
        let t = tighten_disjunction(&m.disjunctions[0], &m.vars);
        let sum_row = |d: &Disjunct| d.rows.iter().find(|r| r.terms() == [(x, 1.0), (y, 1.0)]).unwrap().rhs;
        assert_eq!(sum_row(&t.disjunction.disjuncts[0]), 2.0);
        assert_eq!(sum_row(&t.disjunction.disjuncts[1]), 20.0);
        assert!(shared_lhs(&t.disjunction));
    }

    /// Random disjunction in `[0, 4]²` with small integer rows.
    fn planar_model(disjuncts: Vec<Vec<(i8, i8, i8)>>, objective: (i8, i8)) -> GdpModel {
        let mut m = GdpModel::new("planar");
        let x = m.add_var("x", 0.0, 4.0);
        let y = m.add_var("y", 0.0, 4.0);
        let ds = disjuncts
            .into_iter()
            .enumerate()
            .map(|(j, rows)| Disjunct {
                indicator: m.add_bool(format!("d{j}")),
                rows: rows
                    .into_iter()
                    .map(|(a, b, c)| LinRow::le([(x, f64::from(a)), (y, f64::from(b))], f64::from(c)))
                    .collect(),
            })
            .collect();
        m.add_disjunction("d", ds);
        m.set_objective([(x, f64::from(objective.0)), (y, f64::from(objective.1))]);
        m
    }

    fn row_strategy() -> impl Strategy<Value = (i8, i8, i8)> {
        (-2i8..=2, -2i8..=2, -6i8..=8).prop_filter("nonzero row", |&(a, b, _)| a != 0 || b != 0)
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tightening_keeps_each_disjunct_in_the_box(
            disjuncts in prop::collection::vec(prop::collection::vec(row_strategy(), 1..4), 2..4),
        ) {
            let m = planar_model(disjuncts, (1, 1));
            let t = tighten_disjunction(&m.disjunctions[0], &m.vars);
            let canon = canonicalize_disjunction(&m.disjunctions[0]);
            for (j, (before, after)) in canon.disjuncts.iter().zip(&t.disjunction.disjuncts).enumerate() {
                prop_assert_eq!(before.indicator, after.indicator);
                let mut any = false;
                for i in 0..=16 {
                    for k in 0..=16 {
                        let p = [f64::from(i) / 4.0, f64::from(k) / 4.0];
                        let inside = |d: &Disjunct| d.rows.iter().all(|r| r.violation(|v| p[v.0]) <= 1e-9);
                        prop_assert_eq!(inside(before), inside(after), "disjunct {} at {:?}", j, p);
                        any |= inside(before);
                    }
                }
                if any {
                    prop_assert!(!t.empty[j]);
                }
            }
        }

        #[test]
        fn tightened_planar_aggregation_is_the_hull(
            disjuncts in prop::collection::vec(prop::collection::vec(row_strategy(), 1..4), 2..4),
            objective in (-3i8..=3, -3i8..=3),
        ) {
            let m = planar_model(disjuncts, objective);
            let hr = lp_value(&m, Pass::Hull, false);
            let rhr = lp_value(&m, Pass::ReaggregatedHull, true);
            match (hr, rhr) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-7, "HR {} vs RHR {}", a, b),
                (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
            }
        }
    }
}
