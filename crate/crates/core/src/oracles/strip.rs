use super::{OracleError, OracleResult};
use crate::builders::StripInstance;

pub const MAX_RECTS: usize = 5;

/// Relation chosen for a pair `i < j`, in the disjunct order of the strip
/// models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `i` left of `j`.
    Left,
    /// `j` left of `i`.
    Right,
    /// `i` above `j`.
    Above,
    /// `j` above `i`.
    Below,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::Left, Relation::Right, Relation::Above, Relation::Below];

    /// Position of the matching disjunct.
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Packing {
    pub x: Vec<f64>,
    /// Top edge of each rectangle.
    pub y: Vec<f64>,
    /// One relation per pair `(i, j)`, `i < j`, in lexicographic pair order.
    pub relations: Vec<Relation>,
    pub length: f64,
}

/// Smallest values `v ≥ base` with `v[to] ≥ v[from] + w` for every edge, or
/// `None` when the edges contain a cycle.
fn longest_paths(base: &[f64], edges: &[(usize, usize, f64)]) -> Option<Vec<f64>> {
    let mut v = base.to_vec();
    for _ in 0..=base.len() {
        let mut changed = false;
        for &(from, to, w) in edges {
            if v[from] + w > v[to] {
                v[to] = v[from] + w;
                changed = true;
            }
        }
        if !changed {
            return Some(v);
        }
    }
    None
}

/// Minimum strip length over every assignment of one relation per pair.
/// With the relations fixed the rows are difference constraints, so the
/// least positions are longest paths from the lower bounds.
pub fn strip_oracle(inst: &StripInstance) -> Result<OracleResult<Packing>, OracleError> {
    inst.validate()?;
    let n = inst.len();
    if n > MAX_RECTS {
        return Err(OracleError::TooLarge { n, max: MAX_RECTS });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let lengths: Vec<f64> = inst.rects.iter().map(|r| r.l).collect();
    let heights: Vec<f64> = inst.rects.iter().map(|r| r.h).collect();
    let mut best: Option<Packing> = None;
    let mut xe = Vec::new();
    let mut ye = Vec::new();
    for code in 0..4usize.pow(pairs.len() as u32) {
        let relations: Vec<Relation> = (0..pairs.len()).map(|k| Relation::ALL[(code >> (2 * k)) & 3]).collect();
        xe.clear();
        ye.clear();
        for (&(i, j), rel) in pairs.iter().zip(&relations) {
            match rel {
                Relation::Left => xe.push((i, j, lengths[i])),
                Relation::Right => xe.push((j, i, lengths[j])),
                Relation::Above => ye.push((j, i, heights[i])),
                Relation::Below => ye.push((i, j, heights[j])),
            }
        }
        let Some(x) = longest_paths(&vec![0.0; n], &xe) else { continue };
        let length = x.iter().zip(&lengths).map(|(x, l)| x + l).fold(0.0, f64::max);
        if length > inst.ub || best.as_ref().is_some_and(|b| length >= b.length) {
            continue;
        }
        let Some(y) = longest_paths(&heights, &ye) else { continue };
        if y.iter().any(|&v| v > inst.width) {
            continue;
        }
        best = Some(Packing { x, y, relations, length });
    }
    Ok(OracleResult { optimum: best.as_ref().map(|b| b.length), witness: best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rectangle() {
        let r = strip_oracle(&StripInstance::new([(4.0, 1.0)], 5.0)).unwrap();
        assert_eq!(r.optimum, Some(4.0));
    }

    #[test]
    fn two_rectangles_too_tall_to_stack() {
        let r = strip_oracle(&StripInstance::new([(3.0, 3.0), (4.0, 3.0)], 5.0)).unwrap();
        assert_eq!(r.optimum, Some(7.0));
    }

    #[test]
    fn three_squares_stack() {
        let r = strip_oracle(&StripInstance::new([(2.0, 2.0); 3], 6.0)).unwrap();
        assert_eq!(r.optimum, Some(2.0));
        let w = r.witness.unwrap();
        assert!(w.relations.iter().all(|r| matches!(r, Relation::Above | Relation::Below)));
        assert_eq!(w.x, vec![0.0; 3]);
    }

    #[test]
    fn cycles_are_infeasible() {
        assert_eq!(longest_paths(&[0.0, 0.0], &[(0, 1, 1.0), (1, 0, 1.0)]), None);
        assert_eq!(longest_paths(&[0.0, 0.0], &[(0, 1, 1.0)]), Some(vec![0.0, 1.0]));
    }

    #[test]
    fn size_guard() {
        let inst = StripInstance::new([(1.0, 1.0); 6], 5.0);
        assert_eq!(strip_oracle(&inst).unwrap_err(), OracleError::TooLarge { n: 6, max: 5 });
    }
}
