use std::collections::HashSet;
use std::fmt;

use super::{GdpModel, LinRow};

/// A violated IR invariant, naming the offending entity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

/// Check every structural invariant of the model. An empty result means the
/// model is valid input for the reformulation passes.
pub fn validate(model: &GdpModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |entity: String, message: String| out.push(Diagnostic { entity, message });

    for v in &model.vars {
        if !v.lower.is_finite() || !v.upper.is_finite() {
            push(format!("variable {}", v.name), format!("box [{}, {}] is not finite", v.lower, v.upper));
        } else if v.lower > v.upper {
            push(format!("variable {}", v.name), format!("inverted box [{}, {}]", v.lower, v.upper));
        }
    }

    let n_vars = model.vars.len();
    let n_bools = model.bools.len();
    let check_row = |row: &LinRow, entity: &str, push: &mut dyn FnMut(String, String)| {
        if row.terms().is_empty() {
            push(entity.to_string(), "row has no nonzero coefficient".into());
        }
        for &(v, a) in row.terms() {
            if v.0 >= n_vars {
                push(entity.to_string(), format!("references undeclared variable #{}", v.0));
            }
            if !a.is_finite() {
                push(entity.to_string(), format!("non-finite coefficient {a}"));
            }
        }
        if !row.rhs.is_finite() {
            push(entity.to_string(), format!("non-finite right-hand side {}", row.rhs));
        }
    };

    for &(v, c) in &model.objective {
        if v.0 >= n_vars {
            push("objective".into(), format!("references undeclared variable #{}", v.0));
        }
        if !c.is_finite() {
            push("objective".into(), format!("non-finite coefficient {c}"));
        }
    }
    for (i, row) in model.globals.iter().enumerate() {
        check_row(row, &format!("global row {i}"), &mut push);
    }
    for (k, disj) in model.disjunctions.iter().enumerate() {
        let name = format!("disjunction {k} ({})", disj.name);
        if disj.disjuncts.len() < 2 {
            push(name.clone(), format!("has {} disjunct(s), needs at least 2", disj.disjuncts.len()));
        }
        let mut seen = HashSet::new();
        for (j, d) in disj.disjuncts.iter().enumerate() {
            let dname = format!("disjunct {j} of {name}");
            if d.indicator.0 >= n_bools {
                push(dname.clone(), format!("indicator #{} is undeclared", d.indicator.0));
            }
            if !seen.insert(d.indicator) {
                push(dname.clone(), format!("indicator #{} repeated", d.indicator.0));
            }
            for (r, row) in d.rows.iter().enumerate() {
                check_row(row, &format!("row {r} of {dname}"), &mut push);
            }
        }
    }
    for (i, row) in model.logic.iter().enumerate() {
        if row.terms.is_empty() {
            push(format!("logic row {i}"), "row has no terms".into());
        }
        for &(b, _) in &row.terms {
            if b.0 >= n_bools {
                push(format!("logic row {i}"), format!("references undeclared indicator #{}", b.0));
            }
        }
    }
    out
}
