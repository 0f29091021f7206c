use super::OracleError;
use crate::gdp::{canonicalize_disjunction, Col, ContinuousVar, Disjunction, MilpModel};
use crate::milp::{solve_lp, LpStatus};

/// Grid intervals per axis; the spacing is `1/DEFAULT_STEPS` of the box width.
pub const DEFAULT_STEPS: usize = 64;
const TOL: f64 = 1e-9;

/// In/out flags on a regular grid over a 1-D or 2-D box, `steps + 1`
/// points per axis, first axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct HullMask {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub steps: usize,
    pub inside: Vec<bool>,
}

impl HullMask {
    fn empty(boxes: &[ContinuousVar], steps: usize) -> Self {
        let points = (steps + 1).pow(boxes.len() as u32);
        HullMask {
            lower: boxes.iter().map(|v| v.lower).collect(),
            upper: boxes.iter().map(|v| v.upper).collect(),
            steps,
            inside: vec![false; points],
        }
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    /// Grid indices of point `k`.
    pub fn index(&self, k: usize) -> Vec<usize> {
        let side = self.steps + 1;
        (0..self.dims()).map(|d| (k / side.pow(d as u32)) % side).collect()
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.index(k)
            .iter()
            .enumerate()
            .map(|(d, &i)| self.lower[d] + (self.upper[d] - self.lower[d]) * i as f64 / self.steps as f64)
            .collect()
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// True when every grid point within `band` cells of `k` agrees with it.
    fn interior(&self, k: usize, band: usize) -> bool {
        let side = self.steps + 1;
        let idx = self.index(k);
        let ranges: Vec<(usize, usize)> = idx.iter().map(|&i| (i.saturating_sub(band), (i + band).min(self.steps))).collect();
        let here = self.inside[k];
        match ranges.as_slice() {
            [(a0, a1)] => (*a0..=*a1).all(|i| self.inside[i] == here),
            [(a0, a1), (b0, b1)] => (*b0..=*b1).all(|j| (*a0..=*a1).all(|i| self.inside[j * side + i] == here)),
            _ => true,
        }
    }
}

type Halfplane = ([f64; 2], f64);

/// Canonical `a·x ≤ b` rows of each disjunct, over the first `dims` variables.
fn halfplanes(disjunction: &Disjunction, dims: usize) -> Result<Vec<Vec<Halfplane>>, OracleError> {
    let canon = canonicalize_disjunction(disjunction);
    canon
        .disjuncts
        .iter()
        .map(|d| {
            d.rows
                .iter()
                .map(|r| {
                    let mut a = [0.0; 2];
                    for &(v, c) in r.terms() {
                        if v.0 >= dims {
                            return Err(OracleError::Dimension(v.0 + 1));
                        }
                        a[v.0] = c;
                    }
                    Ok((a, r.rhs))
                })
                .collect()
        })
        .collect()
}

fn box_rows(boxes: &[ContinuousVar]) -> Vec<([f64; 2], f64)> {
    let mut rows = Vec::new();
    for (d, v) in boxes.iter().enumerate() {
        let mut a = [0.0; 2];
        a[d] = 1.0;
        rows.push((a, v.upper));
        a[d] = -1.0;
        rows.push((a, -v.lower));
    }
    rows
}

/// Vertices of `{a·x ≤ b}` in the plane: feasible pairwise intersections.
fn polygon_vertices(rows: &[([f64; 2], f64)]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for (k, (a, b)) in rows.iter().enumerate() {
        for (c, e) in &rows[k + 1..] {
            let det = a[0] * c[1] - a[1] * c[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let p = [(b * c[1] - a[1] * e) / det, (a[0] * e - b * c[0]) / det];
            if rows.iter().all(|(g, h)| g[0] * p[0] + g[1] * p[1] <= h + TOL * (1.0 + h.abs())) {
                out.push(p);
            }
        }
    }
    out
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull, collinear points dropped.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < TOL && (a[1] - b[1]).abs() < TOL);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn in_hull(hull: &[[f64; 2]], p: [f64; 2]) -> bool {
    let eps = 1e-9;
    match hull.len() {
        0 => false,
        1 => (hull[0][0] - p[0]).abs() <= eps && (hull[0][1] - p[1]).abs() <= eps,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let len2 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
            let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / len2;
            (-eps..=1.0 + eps).contains(&t) && cross(a, b, p).abs() <= eps * len2.sqrt().max(1.0)
        }
        _ => (0..hull.len()).all(|k| {
            let (a, b) = (hull[k], hull[(k + 1) % hull.len()]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross(a, b, p) >= -eps * len.max(1.0)
        }),
    }
}

/// Grid mask of the convex hull of the union of the disjunct sets, each
/// intersected with `boxes` (one box per dimension, variables `0..dims`).
pub fn hull_oracle_1d2d(disjunction: &Disjunction, boxes: &[ContinuousVar], steps: usize) -> Result<HullMask, OracleError> {
    let dims = boxes.len();
    if !(1..=2).contains(&dims) {
        return Err(OracleError::Dimension(dims));
    }
    let disjuncts = halfplanes(disjunction, dims)?;
    let mut mask = HullMask::empty(boxes, steps);
    if dims == 1 {
        let mut hull: Option<(f64, f64)> = None;
        for rows in &disjuncts {
            let (mut lo, mut hi) = (boxes[0].lower, boxes[0].upper);
            for &(a, b) in rows {
                if a[0] > 0.0 {
                    hi = hi.min(b / a[0]);
                } else if a[0] < 0.0 {
                    lo = lo.max(b / a[0]);
                } else if b < 0.0 {
                    hi = f64::NEG_INFINITY;
                }
            }
            if lo <= hi + TOL {
                hull = Some(hull.map_or((lo, hi), |(l, h)| (l.min(lo), h.max(hi))));
            }
        }
        for k in 0..mask.inside.len() {
            let x = mask.point(k)[0];
            mask.inside[k] = hull.is_some_and(|(lo, hi)| x >= lo - TOL && x <= hi + TOL);
        }
        return Ok(mask);
    }
    let outer = box_rows(boxes);
    let mut vertices = Vec::new();
    for rows in &disjuncts {
        let mut all = rows.clone();
        all.extend(outer.iter().copied());
        vertices.extend(polygon_vertices(&all));
    }
    let hull = convex_hull(vertices);
    for k in 0..mask.inside.len() {
        let p = mask.point(k);
        mask.inside[k] = in_hull(&hull, [p[0], p[1]]);
    }
    Ok(mask)
}

/// Grid mask of the projection of `model`'s LP relaxation onto columns
/// `0..dims`, sampled at the points of `template`.
pub fn relaxation_mask(model: &MilpModel, template: &HullMask) -> HullMask {
    let mut mask = template.clone();
    for k in 0..mask.inside.len() {
        let p = template.point(k);
        let fix: Vec<(Col, f64, f64)> = p.iter().enumerate().map(|(d, &v)| (Col(d), v, v)).collect();
        mask.inside[k] = solve_lp(model, &fix).status == LpStatus::Optimal;
    }
    mask
}

/// Points where the masks disagree, ignoring those within `band` grid
/// cells of the boundary of `reference`.
pub fn mask_mismatches(reference: &HullMask, other: &HullMask, band: usize) -> usize {
    assert_eq!(reference.inside.len(), other.inside.len(), "masks on different grids");
    (0..reference.inside.len())
        .filter(|&k| reference.inside[k] != other.inside[k] && reference.interior(k, band))
        .count()
}
