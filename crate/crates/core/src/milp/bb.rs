use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use web_time::Instant;

use super::simplex::{Basis, DualSimplex, LpStatus};
use crate::gdp::MilpModel;

/// Distance from 0 or 1 at which a binary counts as fractional.
pub const INT_TOL: f64 = 1e-6;
/// Floor of the relative-gap denominator.
pub const GAP_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct BbConfig {
    pub rel_gap: f64,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl Default for BbConfig {
    fn default() -> Self {
        BbConfig { rel_gap: 1e-4, time_limit: None, node_limit: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Every node was processed or pruned.
    Optimal,
    /// Stopped with open nodes once the relative gap reached the target.
    GapLimit,
    TimeLimit,
    NodeLimit,
    Infeasible,
}

impl SolveStatus {
    /// Proven optimal within the requested gap.
    pub fn is_solved(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapLimit)
    }

    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::GapLimit => "gap_limit",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::NodeLimit => "node_limit",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// Global lower bound; `+∞` when infeasibility is proven.
    pub bound: f64,
    /// `(objective − bound) / max(|objective|, GAP_FLOOR)`, `+∞` without an incumbent.
    pub gap: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: Duration,
    pub solution: Option<Vec<f64>>,
    pub root_bound: Option<f64>,
    /// Global bound after each processed node.
    pub bound_trace: Vec<f64>,
}

pub(crate) fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    (incumbent - bound) / incumbent.abs().max(GAP_FLOOR)
}

struct Node {
    bound: f64,
    depth: u32,
    id: u64,
    fixings: Vec<(u32, bool)>,
    /// Final basis of the parent and the parent's id.
    warm: Option<(u64, Rc<Basis>)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: lowest bound first, then deepest, then newest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.id.cmp(&other.id))
    }
}

/// Best-bound branch and bound on the binaries, branching on the most
/// fractional one (lowest index on ties). Node LPs are re-solved from the
/// previous node's basis.
pub fn solve_bb(model: &MilpModel, config: &BbConfig) -> SolveResult {
    let start = Instant::now();
    let binaries: Vec<usize> = model.binaries().map(|c| c.0).collect();
    let mut lp = DualSimplex::new(model);
    let base: Vec<(f64, f64)> = binaries.iter().map(|&c| lp.bounds(c)).collect();

    let mut heap = BinaryHeap::new();
    heap.push(Node { bound: f64::NEG_INFINITY, depth: 0, id: 0, fixings: Vec::new(), warm: None });
    let mut last_solved = None;
    let mut next_id = 1u64;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut pruned_min = f64::INFINITY;
    let mut nodes = 0u64;
    let mut root_bound = None;
    let mut trace = Vec::new();
    let mut current = base.clone();

    let global = |heap: &BinaryHeap<Node>, pruned_min: f64, inc: &Option<(f64, Vec<f64>)>| {
        let open = heap.peek().map_or(f64::INFINITY, |n| n.bound);
        open.min(pruned_min).min(inc.as_ref().map_or(f64::INFINITY, |i| i.0))
    };

    let status = loop {
        let Some(top) = heap.peek() else {
            break if incumbent.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible };
        };
        if let Some((inc, _)) = &incumbent {
            if relative_gap(*inc, top.bound.min(pruned_min)) <= config.rel_gap {
                break SolveStatus::GapLimit;
            }
        }
        if config.time_limit.is_some_and(|t| start.elapsed() >= t) {
            break SolveStatus::TimeLimit;
        }
        if config.node_limit.is_some_and(|n| nodes >= n) {
            break SolveStatus::NodeLimit;
        }
        let node = heap.pop().expect("peeked");
        nodes += 1;

        let mut target = base.clone();
        for &(k, up) in &node.fixings {
            let v = if up { 1.0 } else { 0.0 };
            target[k as usize] = (v, v);
        }
        for (k, &col) in binaries.iter().enumerate() {
            if target[k] != current[k] {
                lp.set_bounds(col, target[k].0, target[k].1);
                current[k] = target[k];
            }
        }

        if let Some((parent, basis)) = &node.warm {
            if last_solved != Some(*parent) {
                lp.load_basis(basis);
            }
        }
        let status = lp.solve();
        last_solved = Some(node.id);
        let lp_obj = match status {
            LpStatus::Optimal => {
                let x = lp.primal();
                let obj = lp.objective(&x);
                Some((obj, x))
            }
            _ => None,
        };
        if node.id == 0 {
            root_bound = lp_obj.as_ref().map(|o| o.0);
        }
        if let Some((obj, x)) = lp_obj {
            let bound = obj.max(node.bound);
            let prune = incumbent.as_ref().is_some_and(|(inc, _)| relative_gap(*inc, bound) <= config.rel_gap);
            if prune {
                pruned_min = pruned_min.min(bound);
            } else {
                let mut branch: Option<(usize, f64)> = None;
                for (k, &col) in binaries.iter().enumerate() {
                    let frac = x[col].min(1.0 - x[col]);
                    if frac > INT_TOL && branch.is_none_or(|(_, f)| frac > f) {
                        branch = Some((k, frac));
                    }
                }
                match branch {
                    None => {
                        if incumbent.as_ref().is_none_or(|(inc, _)| obj < *inc) {
                            let mut x = x;
                            for &col in &binaries {
                                x[col] = x[col].round();
                            }
                            incumbent = Some((obj, x));
                        }
                    }
                    Some((k, _)) => {
                        let basis = Rc::new(lp.basis());
                        for up in [false, true] {
                            let mut fixings = node.fixings.clone();
                            fixings.push((k as u32, up));
                            heap.push(Node {
                                bound,
                                depth: node.depth + 1,
                                id: next_id,
                                fixings,
                                warm: Some((node.id, Rc::clone(&basis))),
                            });
                            next_id += 1;
                        }
                    }
                }
            }
        }
        // LP failures other than infeasibility leave the node unexplored; its
        // bound still counts.
        if status == LpStatus::IterationLimit {
            pruned_min = pruned_min.min(node.bound);
        }
        trace.push(global(&heap, pruned_min, &incumbent));
    };

    let bound = match status {
        SolveStatus::Infeasible => f64::INFINITY,
        _ => global(&heap, pruned_min, &incumbent),
    };
    let (objective, solution) = match incumbent {
        Some((v, x)) => (Some(v), Some(x)),
        None => (None, None),
    };
    let gap = objective.map_or(f64::INFINITY, |v| relative_gap(v, bound).max(0.0));
    let status = match status {
        SolveStatus::Optimal if gap > config.rel_gap => SolveStatus::GapLimit,
        s => s,
    };
    SolveResult {
        status,
        objective,
        bound,
        gap,
        nodes,
        lp_iterations: lp.iterations,
        wall_time: start.elapsed(),
        solution,
        root_bound,
        bound_trace: trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdp::{Col, LinRow, Pass, RowOrigin};

    /// max 5a + 4b + 3c s.t. 2a + 3b + c ≤ 5, 4a + b + 2c ≤ 11, 3a + 4b + 2c ≤ 8
    fn knapsack() -> MilpModel {
        let mut m = MilpModel::new("k", Pass::BigM);
        let cols: Vec<Col> = (0..3).map(|i| m.add_binary(format!("b{i}"))).collect();
        for (k, (coeffs, rhs)) in
            [([2.0, 3.0, 1.0], 5.0), ([4.0, 1.0, 2.0], 11.0), ([3.0, 4.0, 2.0], 8.0)].into_iter().enumerate()
        {
            m.add_row(LinRow::le(cols.iter().copied().zip(coeffs), rhs), RowOrigin::Global { index: k });
        }
        m.objective = cols.iter().copied().zip([-5.0, -4.0, -3.0]).collect();
        m
    }

    #[test]
    fn small_binary_program() {
        let r = solve_bb(&knapsack(), &BbConfig::default());
        assert!(r.status.is_solved());
        let m = knapsack();
        let best = (0..8u32)
            .map(|mask| (0..3).map(|i| f64::from((mask >> i) & 1)).collect::<Vec<_>>())
            .filter(|x| m.max_violation(x) <= 0.0)
            .map(|x| m.objective_value(&x))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.objective, Some(best));
        assert!(r.gap <= 1e-4);
        assert!(r.bound <= best + 1e-9);
    }

    #[test]
    fn bound_trace_is_monotone() {
        let r = solve_bb(&knapsack(), &BbConfig::default());
        assert!(r.bound_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(r.bound_trace.iter().all(|&b| b <= r.objective.unwrap() + 1e-6));
    }

    #[test]
    fn infeasible_program() {
        let mut m = MilpModel::new("i", Pass::BigM);
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_row(LinRow::eq([(a, 2.0), (b, 2.0)], 1.0), RowOrigin::Global { index: 0 });
        let r = solve_bb(&m, &BbConfig::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.objective, None);
        assert_eq!(r.gap, f64::INFINITY);
    }

    #[test]
    fn node_limit_is_reported() {
        let r = solve_bb(&knapsack(), &BbConfig { node_limit: Some(1), ..BbConfig::default() });
        assert_eq!(r.nodes, 1);
        assert!(matches!(r.status, SolveStatus::NodeLimit | SolveStatus::Optimal | SolveStatus::GapLimit));
    }
}
