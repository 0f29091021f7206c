//! Browser bindings for the interactive demo page in `www/`.
//!
//! Every export has a plain Rust counterpart returning JSON text, so the
//! logic is testable without a JavaScript host.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use gldp::bench::{build_milp, instance_to_json, parse_instance, Concept, Instance};
use gldp::builders::{gen_scheduling, gen_strip};
use gldp::gdp::{Disjunct, GdpModel, LinRow, MilpModel, Pass};
use gldp::milp::{solve_bb, BbConfig, SolveResult};
use gldp::oracles::{hull_oracle_1d2d, relaxation_mask, sched_oracle, HullMask};
use gldp::reformulate::reformulate;

/// Largest grid resolution accepted by [`hull_masks`].
pub const MAX_STEPS: usize = 80;
/// Largest instance the demo solves; larger ones take too long in a page.
pub const MAX_ITEMS: usize = 8;

fn col(model: &MilpModel, name: &str) -> Result<usize, String> {
    model.col_by_name(name).map(|c| c.0).ok_or_else(|| format!("model has no column {name}"))
}

fn summary(r: &SolveResult) -> Value {
    json!({
        "status": r.status.label(),
        "objective": r.objective,
        "bound": if r.bound.is_finite() { Some(r.bound) } else { None },
        "nodes": r.nodes,
        "lp_iterations": r.lp_iterations,
        "time_ms": r.wall_time.as_secs_f64() * 1e3,
    })
}

fn prepare(instance_json: &str, concept: &str, reform: &str, auto_align: bool) -> Result<(Instance, MilpModel), String> {
    let inst = parse_instance(instance_json).map_err(|e| e.to_string())?;
    if inst.len() > MAX_ITEMS {
        return Err(format!("the demo solves at most {MAX_ITEMS} items, got {}", inst.len()));
    }
    let concept: Concept = concept.parse()?;
    let pass: Pass = reform.parse()?;
    let model = build_milp(&inst, concept, pass, auto_align).map_err(|e| e.to_string())?;
    Ok((inst, model))
}

/// Random instance JSON; `kind` is `scheduling` or `strip`.
pub fn generate_json(kind: &str, n: usize, seed: u64) -> Result<String, String> {
    let inst = match kind {
        "scheduling" => Instance::Scheduling(gen_scheduling(n, seed)),
        "strip" => Instance::Strip(gen_strip(n, seed)),
        _ => return Err(format!("unknown instance kind '{kind}'")),
    };
    Ok(instance_to_json(&inst))
}

/// Solve a scheduling instance and report job start times for a Gantt chart,
/// together with the brute-force optimum.
pub fn schedule_json(instance_json: &str, concept: &str, reform: &str, auto_align: bool) -> Result<String, String> {
    let (inst, model) = prepare(instance_json, concept, reform, auto_align)?;
    let Instance::Scheduling(sched) = &inst else {
        return Err("expected a scheduling instance (\"jobs\")".into());
    };
    let r = solve_bb(&model, &BbConfig::default());
    let n = sched.len();
    let starts: Option<Vec<f64>> = match &r.solution {
        None => None,
        Some(x) if concept.eq_ignore_ascii_case("TS") => {
            // Slot t holds the job whose assignment binary is set.
            let mut starts = vec![0.0; n];
            for t in 0..n {
                let xt = x[col(&model, &format!("x[{t}]"))?];
                for (i, s) in starts.iter_mut().enumerate() {
                    if x[col(&model, &format!("y[{i},{t}]"))?] > 0.5 {
                        *s = xt;
                    }
                }
            }
            Some(starts)
        }
        Some(x) => Some((0..n).map(|i| col(&model, &format!("x[{i}]")).map(|c| x[c])).collect::<Result<_, _>>()?),
    };
    let oracle = sched_oracle(sched).ok().and_then(|o| o.optimum);
    let jobs: Vec<Value> = sched
        .jobs
        .iter()
        .enumerate()
        .map(|(i, j)| json!({ "p": j.p, "r": j.r, "d": j.d, "start": starts.as_ref().map(|s| s[i]) }))
        .collect();
    let mut out = summary(&r);
    out["jobs"] = json!(jobs);
    out["oracle"] = json!(oracle);
    out["rows"] = json!(model.rows.len());
    out["columns"] = json!(model.vars.len());
    Ok(out.to_string())
}

/// Solve a strip-packing instance and report rectangle placements.
pub fn pack_json(instance_json: &str, concept: &str, reform: &str, auto_align: bool) -> Result<String, String> {
    let (inst, model) = prepare(instance_json, concept, reform, auto_align)?;
    let Instance::Strip(strip) = &inst else {
        return Err("expected a strip instance (\"rects\")".into());
    };
    let r = solve_bb(&model, &BbConfig::default());
    let mut rects = Vec::new();
    for (i, rect) in strip.rects.iter().enumerate() {
        let (x, top) = match &r.solution {
            Some(sol) => (Some(sol[col(&model, &format!("x[{i}]"))?]), Some(sol[col(&model, &format!("y[{i}]"))?])),
            None => (None, None),
        };
        // `y` is the top edge of the rectangle.
        rects.push(json!({ "L": rect.l, "H": rect.h, "x": x, "y": top.map(|t| t - rect.h) }));
    }
    let mut out = summary(&r);
    out["W"] = json!(strip.width);
    out["UB"] = json!(strip.ub);
    out["rects"] = json!(rects);
    out["rows"] = json!(model.rows.len());
    out["columns"] = json!(model.vars.len());
    Ok(out.to_string())
}

/// Two axis-aligned boxes `[x0, x1] × [y0, y1]` as alternatives inside
/// `[0, 10]²`.
fn two_boxes(a: [f64; 4], b: [f64; 4]) -> Result<GdpModel, String> {
    let mut m = GdpModel::new("two_boxes");
    let x = m.add_var("x", 0.0, 10.0);
    let y = m.add_var("y", 0.0, 10.0);
    let mut disjuncts = Vec::new();
    for (name, [x0, x1, y0, y1]) in [("a", a), ("b", b)] {
        if !(0.0..=10.0).contains(&x0) || !(0.0..=10.0).contains(&y0) || x1 > 10.0 || y1 > 10.0 || x0 > x1 || y0 > y1 {
            return Err(format!("box {name} must satisfy 0 ≤ lo ≤ hi ≤ 10"));
        }
        let ind = m.add_bool(name);
        disjuncts.push(Disjunct {
            indicator: ind,
            rows: vec![
                LinRow::ge([(x, 1.0)], x0),
                LinRow::le([(x, 1.0)], x1),
                LinRow::ge([(y, 1.0)], y0),
                LinRow::le([(y, 1.0)], y1),
            ],
        });
    }
    m.add_disjunction("d", disjuncts);
    m.set_objective([(x, 1.0)]);
    Ok(m)
}

fn mask_value(mask: &HullMask) -> Value {
    json!(mask.inside.iter().map(|&b| u8::from(b)).collect::<Vec<_>>())
}

/// Grid masks (first axis fastest) of the exact convex hull of two boxes
/// and of the LP relaxations of the big-M, hull and reaggregated-hull
/// reformulations.
pub fn hull_masks_json(a: [f64; 4], b: [f64; 4], steps: usize) -> Result<String, String> {
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_STEPS}"));
    }
    let gdp = two_boxes(a, b)?;
    let oracle = hull_oracle_1d2d(&gdp.disjunctions[0], &gdp.vars, steps).map_err(|e| e.to_string())?;
    let mut out = json!({ "steps": steps, "lower": oracle.lower, "upper": oracle.upper, "hull": mask_value(&oracle) });
    for pass in Pass::ALL {
        let milp = reformulate(&gdp, pass, false).map_err(|e| e.to_string())?;
        out[pass.to_string()] = mask_value(&relaxation_mask(&milp, &oracle));
    }
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn generate(kind: &str, n: usize, seed: u32) -> Result<String, JsError> {
    generate_json(kind, n, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn schedule(instance_json: &str, concept: &str, reform: &str, auto_align: bool) -> Result<String, JsError> {
    schedule_json(instance_json, concept, reform, auto_align).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pack(instance_json: &str, concept: &str, reform: &str, auto_align: bool) -> Result<String, JsError> {
    pack_json(instance_json, concept, reform, auto_align).map_err(|e| JsError::new(&e))
}

/// Boxes are given as `[x0, x1, y0, y1]`.
#[wasm_bindgen]
pub fn hull_masks(a: Vec<f64>, b: Vec<f64>, steps: usize) -> Result<String, JsError> {
    let four = |v: Vec<f64>| -> Result<[f64; 4], JsError> {
        v.try_into().map_err(|_| JsError::new("a box needs four numbers: x0, x1, y0, y1"))
    };
    hull_masks_json(four(a)?, four(b)?, steps).map_err(|e| JsError::new(&e))
}
