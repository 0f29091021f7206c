//! Intermediate representation for generalized linear disjunctive programs.
//!
//! A [`GdpModel`] holds boxed continuous variables, Boolean indicators,
//! global linear rows, disjunctions of linear systems, pre-linearized logic
//! rows over the indicators, and a linear objective to minimize. Reformulation
//! passes in [`crate::reformulate`] lower it to a [`MilpModel`].

mod canon;
mod milp_model;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use canon::{canonicalize_disjunction, canonicalize_rows, cmp_terms};
pub use milp_model::{Col, MilpModel, MilpRow, MilpVar, Pass, Provenance, RowOrigin, VarKind};
pub use validate::{validate, Diagnostic};

/// Index of a continuous variable in a [`GdpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

/// Index of a Boolean indicator in a [`GdpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoolId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// A continuous variable with a mandatory finite box.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousVar {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// A sparse linear row `Σ a_v·v  sense  rhs`.
///
/// Terms are sorted by variable, duplicates are merged and exact zeros are
/// dropped, so two rows with the same coefficient vector compare equal
/// term-by-term.
#[derive(Clone, Debug, PartialEq)]
pub struct LinRow<V = VarId> {
    terms: Vec<(V, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl<V: Copy + Ord> LinRow<V> {
    pub fn new(terms: impl IntoIterator<Item = (V, f64)>, sense: Sense, rhs: f64) -> Self {
        let mut raw: Vec<(V, f64)> = terms.into_iter().collect();
        raw.sort_by_key(|t| t.0);
        let mut merged: Vec<(V, f64)> = Vec::with_capacity(raw.len());
        for (v, a) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += a,
                _ => merged.push((v, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        LinRow { terms: merged, sense, rhs }
    }

    pub fn le(terms: impl IntoIterator<Item = (V, f64)>, rhs: f64) -> Self {
        Self::new(terms, Sense::Le, rhs)
    }

    pub fn ge(terms: impl IntoIterator<Item = (V, f64)>, rhs: f64) -> Self {
        Self::new(terms, Sense::Ge, rhs)
    }

    pub fn eq(terms: impl IntoIterator<Item = (V, f64)>, rhs: f64) -> Self {
        Self::new(terms, Sense::Eq, rhs)
    }

    pub fn terms(&self) -> &[(V, f64)] {
        &self.terms
    }

    pub fn coeff(&self, v: V) -> f64 {
        self.terms
            .binary_search_by(|t| t.0.cmp(&v))
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    /// Multiply both sides by −1, flipping `≤`/`≥`.
    pub fn negated(&self) -> Self {
        LinRow {
            terms: self.terms.iter().map(|&(v, a)| (v, -a)).collect(),
            sense: match self.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            },
            rhs: -self.rhs,
        }
    }

    /// Same row with a different right-hand side.
    pub fn with_rhs(&self, rhs: f64) -> Self {
        LinRow { terms: self.terms.clone(), sense: self.sense, rhs }
    }

    pub fn lhs(&self, value: impl Fn(V) -> f64) -> f64 {
        self.terms.iter().map(|&(v, a)| a * value(v)).sum()
    }

    /// Amount by which the row is violated at the given point (0 when satisfied).
    pub fn violation(&self, value: impl Fn(V) -> f64) -> f64 {
        let lhs = self.lhs(value);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// One alternative of a disjunction: an indicator and the rows it enforces.
#[derive(Clone, Debug, PartialEq)]
pub struct Disjunct {
    pub indicator: BoolId,
    pub rows: Vec<LinRow>,
}

/// Exactly one of the disjuncts holds.
#[derive(Clone, Debug, PartialEq)]
pub struct Disjunction {
    pub name: String,
    pub disjuncts: Vec<Disjunct>,
}

impl Disjunction {
    /// Continuous variables appearing in any row of any disjunct, sorted.
    pub fn vars(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .disjuncts
            .iter()
            .flat_map(|d| d.rows.iter())
            .flat_map(|r| r.terms().iter().map(|t| t.0))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicSense {
    Le,
    Eq,
}

/// Linearized logic over indicators, `Σ c_b·y_b  (≤|=)  rhs` with integer data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicRow {
    pub terms: Vec<(BoolId, i64)>,
    pub sense: LogicSense,
    pub rhs: i64,
}

impl LogicRow {
    pub fn exactly_one(bools: impl IntoIterator<Item = BoolId>) -> Self {
        LogicRow { terms: bools.into_iter().map(|b| (b, 1)).collect(), sense: LogicSense::Eq, rhs: 1 }
    }

    pub fn at_most_one(bools: impl IntoIterator<Item = BoolId>) -> Self {
        LogicRow { terms: bools.into_iter().map(|b| (b, 1)).collect(), sense: LogicSense::Le, rhs: 1 }
    }

    pub fn holds(&self, truth: impl Fn(BoolId) -> bool) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(b, c)| if truth(b) { c } else { 0 }).sum();
        match self.sense {
            LogicSense::Le => lhs <= self.rhs,
            LogicSense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GdpModel {
    pub name: String,
    pub vars: Vec<ContinuousVar>,
    pub bools: Vec<String>,
    /// Minimized; continuous variables only.
    pub objective: Vec<(VarId, f64)>,
    pub globals: Vec<LinRow>,
    pub disjunctions: Vec<Disjunction>,
    pub logic: Vec<LogicRow>,
}

impl GdpModel {
    pub fn new(name: impl Into<String>) -> Self {
        GdpModel { name: name.into(), ..Default::default() }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.vars.push(ContinuousVar { name: name.into(), lower, upper });
        VarId(self.vars.len() - 1)
    }

    pub fn add_bool(&mut self, name: impl Into<String>) -> BoolId {
        self.bools.push(name.into());
        BoolId(self.bools.len() - 1)
    }

    pub fn add_global(&mut self, row: LinRow) {
        self.globals.push(row);
    }

    pub fn add_disjunction(&mut self, name: impl Into<String>, disjuncts: Vec<Disjunct>) {
        self.disjunctions.push(Disjunction { name: name.into(), disjuncts });
    }

    pub fn add_logic(&mut self, row: LogicRow) {
        self.logic.push(row);
    }

    pub fn set_objective(&mut self, terms: impl IntoIterator<Item = (VarId, f64)>) {
        self.objective = terms.into_iter().collect();
    }

    pub fn var(&self, id: VarId) -> &ContinuousVar {
        &self.vars[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn bool_by_name(&self, name: &str) -> Option<BoolId> {
        self.bools.iter().position(|b| b == name).map(BoolId)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v.0]).sum()
    }

    /// Check a point against the disjunctive program, with `active[k]` naming
    /// the chosen disjunct of disjunction `k`.
    ///
    /// Indicators are true exactly when some disjunction selects them; each
    /// disjunction must then see exactly one true indicator, which also makes
    /// shared indicators consistent. Returns a description of the first
    /// violated condition.
    pub fn check_point(&self, x: &[f64], active: &[usize], tol: f64) -> Result<(), String> {
        if x.len() != self.vars.len() || active.len() != self.disjunctions.len() {
            return Err("dimension mismatch".into());
        }
        for (i, v) in self.vars.iter().enumerate() {
            if x[i] < v.lower - tol || x[i] > v.upper + tol {
                return Err(format!("variable {} = {} outside [{}, {}]", v.name, x[i], v.lower, v.upper));
            }
        }
        let value = |v: VarId| x[v.0];
        for (i, row) in self.globals.iter().enumerate() {
            if row.violation(value) > tol {
                return Err(format!("global row {i} violated"));
            }
        }
        let mut truth = vec![false; self.bools.len()];
        for (k, disj) in self.disjunctions.iter().enumerate() {
            let Some(d) = disj.disjuncts.get(active[k]) else {
                return Err(format!("disjunction {} has no disjunct {}", disj.name, active[k]));
            };
            truth[d.indicator.0] = true;
        }
        for (k, disj) in self.disjunctions.iter().enumerate() {
            let on: Vec<usize> =
                (0..disj.disjuncts.len()).filter(|&j| truth[disj.disjuncts[j].indicator.0]).collect();
            if on != [active[k]] {
                return Err(format!("disjunction {} does not have exactly one true indicator", disj.name));
            }
            for row in &disj.disjuncts[active[k]].rows {
                if row.violation(value) > tol {
                    return Err(format!("active row of disjunction {} violated", disj.name));
                }
            }
        }
        for (i, row) in self.logic.iter().enumerate() {
            if !row.holds(|b| truth[b.0]) {
                return Err(format!("logic row {i} violated"));
            }
        }
        Ok(())
    }
}
