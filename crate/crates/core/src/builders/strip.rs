use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{InstanceError, StripInstance};
use crate::gdp::{Disjunct, GdpModel, LinRow, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StripVariant {
    /// Four sparse relations per pair.
    #[serde(rename = "S_original")]
    Original,
    /// Vertical relations also keep the pair horizontally overlapping.
    #[serde(rename = "S_symbreak")]
    SymBreak,
    /// `Original` with the box-implied difference bounds in every disjunct.
    S0,
    /// `SymBreak` with the box-implied difference bounds in every disjunct.
    S1,
}

impl StripVariant {
    pub const ALL: [StripVariant; 4] =
        [StripVariant::Original, StripVariant::SymBreak, StripVariant::S0, StripVariant::S1];

    pub fn label(self) -> &'static str {
        match self {
            StripVariant::Original => "S_original",
            StripVariant::SymBreak => "S_symbreak",
            StripVariant::S0 => "S0",
            StripVariant::S1 => "S1",
        }
    }
}

impl fmt::Display for StripVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StripVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StripVariant::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strip variant '{s}'"))
    }
}

/// Strip packing with `(x_i, y_i)` the reference corner of rectangle `i`:
/// `x_i ∈ [0, UB − L_i]`, `y_i ∈ [H_i, W]` (the top edge), and `lt ≥ x_i + L_i`.
/// Each pair `i < j` gets one four-term disjunction: `i` left of `j`,
/// `j` left of `i`, `i` above `j`, `j` above `i`.
pub fn build_strip(inst: &StripInstance, variant: StripVariant) -> Result<GdpModel, InstanceError> {
    inst.validate()?;
    let n = inst.len();
    let (ub, w) = (inst.ub, inst.width);
    let mut m = GdpModel::new(variant.label());
    let xs: Vec<VarId> = inst.rects.iter().enumerate().map(|(i, r)| m.add_var(format!("x[{i}]"), 0.0, ub - r.l)).collect();
    let ys: Vec<VarId> = inst.rects.iter().enumerate().map(|(i, r)| m.add_var(format!("y[{i}]"), r.h, w)).collect();
    let longest = inst.rects.iter().map(|r| r.l).fold(0.0, f64::max);
    let lt = m.add_var("lt", longest, ub);
    for (i, r) in inst.rects.iter().enumerate() {
        m.add_global(LinRow::le([(xs[i], 1.0), (lt, -1.0)], -r.l));
    }
    m.set_objective([(lt, 1.0)]);

    for i in 0..n {
        for j in i + 1..n {
            let (li, hi) = (inst.rects[i].l, inst.rects[i].h);
            let (lj, hj) = (inst.rects[j].l, inst.rects[j].h);
            let dx = [(xs[i], 1.0), (xs[j], -1.0)];
            let dy = [(ys[i], 1.0), (ys[j], -1.0)];
            let left = m.add_bool(format!("Z1[{i},{j}]"));
            let right = m.add_bool(format!("Z1[{j},{i}]"));
            let above = m.add_bool(format!("Z2[{i},{j}]"));
            let below = m.add_bool(format!("Z2[{j},{i}]"));

            let rows: [Vec<LinRow>; 4] = match variant {
                StripVariant::Original | StripVariant::SymBreak => {
                    let mut vertical_extra = Vec::new();
                    if variant == StripVariant::SymBreak {
                        // x_i + L_i ≥ x_j and x_j + L_j ≥ x_i
                        vertical_extra.push(LinRow::ge([(xs[i], 1.0), (xs[j], -1.0)], -li));
                        vertical_extra.push(LinRow::ge([(xs[j], 1.0), (xs[i], -1.0)], -lj));
                    }
                    let with_extra = |row: LinRow| {
                        let mut rows = vec![row];
                        rows.extend(vertical_extra.iter().cloned());
                        rows
                    };
                    [
                        vec![LinRow::le([(xs[i], 1.0), (xs[j], -1.0)], -li)],
                        vec![LinRow::le([(xs[j], 1.0), (xs[i], -1.0)], -lj)],
                        with_extra(LinRow::ge([(ys[i], 1.0), (ys[j], -1.0)], hi)),
                        with_extra(LinRow::ge([(ys[j], 1.0), (ys[i], -1.0)], hj)),
                    ]
                }
                StripVariant::S0 | StripVariant::S1 => {
                    let (dx_lo, dx_hi) = (-ub + lj, ub - li);
                    let (dy_lo, dy_hi) = (-w + hi, w - hj);
                    let (vx_lo, vx_hi) =
                        if variant == StripVariant::S1 { (dx_lo.max(-li), dx_hi.min(lj)) } else { (dx_lo, dx_hi) };
                    [
                        vec![
                            LinRow::le(dx, -li),
                            LinRow::ge(dy, dy_lo),
                            LinRow::le(dy, dy_hi),
                            LinRow::ge(dx, dx_lo),
                        ],
                        vec![LinRow::ge(dx, lj), LinRow::ge(dy, dy_lo), LinRow::le(dy, dy_hi), LinRow::le(dx, dx_hi)],
                        vec![LinRow::ge(dy, hi), LinRow::ge(dx, vx_lo), LinRow::le(dx, vx_hi), LinRow::le(dy, dy_hi)],
                        vec![LinRow::le(dy, -hj), LinRow::ge(dx, vx_lo), LinRow::le(dx, vx_hi), LinRow::ge(dy, dy_lo)],
                    ]
                }
            };
            let disjuncts = [left, right, above, below]
                .into_iter()
                .zip(rows)
                .map(|(indicator, rows)| Disjunct { indicator, rows })
                .collect();
            m.add_disjunction(format!("nonoverlap[{i},{j}]"), disjuncts);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdp::validate;
    use crate::reformulate::shared_lhs;

    fn inst() -> StripInstance {
        StripInstance::new([(3.0, 2.0), (4.0, 2.0), (2.0, 5.0)], 5.0)
    }

    #[test]
    fn every_variant_is_valid() {
        for v in StripVariant::ALL {
            let m = build_strip(&inst(), v).unwrap();
            assert!(validate(&m).is_empty(), "{v}");
            assert_eq!(m.disjunctions.len(), 3);
            assert!(m.disjunctions.iter().all(|d| d.disjuncts.len() == 4));
        }
    }

    #[test]
    fn only_s0_and_s1_share_lhs() {
        for v in StripVariant::ALL {
            let m = build_strip(&inst(), v).unwrap();
            let shared = m.disjunctions.iter().all(shared_lhs);
            assert_eq!(shared, matches!(v, StripVariant::S0 | StripVariant::S1), "{v}");
        }
    }

    #[test]
    fn single_rectangle() {
        let m = build_strip(&StripInstance::new([(4.0, 1.0)], 5.0), StripVariant::Original).unwrap();
        assert!(m.disjunctions.is_empty());
        let lt = m.var_by_name("lt").unwrap();
        assert_eq!(m.var(lt).lower, 4.0);
    }

    #[test]
    fn too_tall_is_rejected() {
        let err = build_strip(&StripInstance::new([(1.0, 1.0), (1.0, 6.0)], 5.0), StripVariant::S0).unwrap_err();
        assert!(matches!(err, InstanceError::TooTall { index: 1, .. }));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in StripVariant::ALL {
            assert_eq!(v.label().parse::<StripVariant>().unwrap(), v);
        }
    }
}
