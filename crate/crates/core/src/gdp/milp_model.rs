use std::fmt;

use serde::{Deserialize, Serialize};

use super::LinRow;

/// Column index in a [`MilpModel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Col(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpVar {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pass {
    #[serde(rename = "BM")]
    BigM,
    #[serde(rename = "HR")]
    Hull,
    #[serde(rename = "RHR")]
    ReaggregatedHull,
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pass::BigM => "BM",
            Pass::Hull => "HR",
            Pass::ReaggregatedHull => "RHR",
        })
    }
}

impl Pass {
    pub const ALL: [Pass; 3] = [Pass::BigM, Pass::Hull, Pass::ReaggregatedHull];
}

impl std::str::FromStr for Pass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pass::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown reformulation '{s}' (expected BM, HR or RHR)"))
    }
}

/// What produced a MILP row. Indices refer to the source [`super::GdpModel`];
/// disjunct row indices are positions after canonicalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowOrigin {
    Global { index: usize },
    Logic { index: usize },
    ExactlyOne { disjunction: usize },
    BigM { disjunction: usize, disjunct: usize, row: usize },
    HullDisjunct { disjunction: usize, disjunct: usize, row: usize },
    HullLower { disjunction: usize, disjunct: usize, var: usize },
    HullUpper { disjunction: usize, disjunct: usize, var: usize },
    HullAggregation { disjunction: usize, var: usize },
    Reaggregated { disjunction: usize, row: usize },
}

impl RowOrigin {
    pub fn kind(&self) -> &'static str {
        match self {
            RowOrigin::Global { .. } => "global",
            RowOrigin::Logic { .. } => "logic",
            RowOrigin::ExactlyOne { .. } => "exactly-one",
            RowOrigin::BigM { .. } => "big-m",
            RowOrigin::HullDisjunct { .. } => "hull-disjunct",
            RowOrigin::HullLower { .. } | RowOrigin::HullUpper { .. } => "hull-bound-link",
            RowOrigin::HullAggregation { .. } => "hull-aggregation",
            RowOrigin::Reaggregated { .. } => "reaggregated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub pass: Pass,
    pub origin: RowOrigin,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.pass, self.origin)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpRow {
    pub row: LinRow<Col>,
    pub tag: Provenance,
}

/// A flat mixed-binary linear program, minimized. Binaries carry an implicit
/// `[0, 1]` box.
#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub pass: Pass,
    pub vars: Vec<MilpVar>,
    pub rows: Vec<MilpRow>,
    pub objective: Vec<(Col, f64)>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>, pass: Pass) -> Self {
        MilpModel { name: name.into(), pass, vars: Vec::new(), rows: Vec::new(), objective: Vec::new() }
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Col {
        self.vars.push(MilpVar { name: name.into(), kind: VarKind::Continuous, lower, upper });
        Col(self.vars.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Col {
        self.vars.push(MilpVar { name: name.into(), kind: VarKind::Binary, lower: 0.0, upper: 1.0 });
        Col(self.vars.len() - 1)
    }

    pub fn add_row(&mut self, row: LinRow<Col>, origin: RowOrigin) {
        self.rows.push(MilpRow { row, tag: Provenance { pass: self.pass, origin } });
    }

    pub fn continuous_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Continuous).count()
    }

    pub fn binary_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn binaries(&self) -> impl Iterator<Item = Col> + '_ {
        self.vars.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| Col(i))
    }

    pub fn col_by_name(&self, name: &str) -> Option<Col> {
        self.vars.iter().position(|v| v.name == name).map(Col)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(c, a)| a * x[c.0]).sum()
    }

    /// Largest row or box violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.row.violation(|c| x[c.0]));
        let boxes = self.vars.iter().zip(x).map(|(v, &xi)| (v.lower - xi).max(xi - v.upper).max(0.0));
        rows.chain(boxes).fold(0.0, f64::max)
    }

    /// Row counts per provenance kind, in first-seen order.
    pub fn row_census(&self) -> Vec<(&'static str, usize)> {
        let mut census: Vec<(&'static str, usize)> = Vec::new();
        for r in &self.rows {
            let kind = r.tag.origin.kind();
            match census.iter_mut().find(|(k, _)| *k == kind) {
                Some(entry) => entry.1 += 1,
                None => census.push((kind, 1)),
            }
        }
        census
    }
}
