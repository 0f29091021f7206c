use std::collections::BTreeMap;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_milp, Concept, Instance};
use crate::gdp::Pass;
use crate::milp::{solve_bb, BbConfig, SolveStatus, GAP_FLOOR};

/// One solve of one (instance, concept, reformulation) triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub concept: Concept,
    pub reformulation: Pass,
    pub status: SolveStatus,
    /// Empty when no incumbent was found.
    pub objective: Option<f64>,
    pub bound: f64,
    /// Percent; `inf` without an incumbent.
    pub gap: f64,
    pub nodes: u64,
    pub time_s: f64,
}

impl BenchRecord {
    pub fn variant(&self) -> String {
        format!("{}_{}", self.concept, self.reformulation)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rejection {
    pub instance: String,
    pub concept: Concept,
    pub reformulation: Pass,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct BenchConfig {
    pub bb: BbConfig,
    pub auto_align: bool,
}

#[derive(Clone, Debug, Default)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub rejected: Vec<Rejection>,
}

/// `100·(incumbent − bound)/max(|incumbent|, GAP_FLOOR)`, `inf` without an incumbent.
pub fn gap_percent(objective: Option<f64>, bound: f64) -> f64 {
    match objective {
        Some(v) => (100.0 * (v - bound) / v.abs().max(GAP_FLOOR)).max(0.0),
        None => f64::INFINITY,
    }
}

/// Why a concept cannot be lowered with `pass`, if it cannot.
pub fn compatibility(concept: Concept, pass: Pass, auto_align: bool) -> Result<(), String> {
    if pass != Pass::ReaggregatedHull || concept.shares_lhs() {
        return Ok(());
    }
    if concept == Concept::Ip {
        return Err("IP has disjuncts with different row counts; RHR does not apply".into());
    }
    if auto_align {
        Ok(())
    } else {
        Err(format!("{concept} does not share left-hand sides; RHR needs --auto-align"))
    }
}

/// Solve every compatible (instance, concept, reformulation) triple.
/// Records come back in instance, concept, reformulation order regardless
/// of how the solves are scheduled.
pub fn run_bench(
    instances: &[(String, Instance)],
    concepts: &[Concept],
    passes: &[Pass],
    config: &BenchConfig,
) -> BenchOutcome {
    let mut jobs = Vec::new();
    let mut outcome = BenchOutcome::default();
    for (id, inst) in instances {
        for &concept in concepts {
            for &pass in passes {
                let reject = |reason: String| Rejection {
                    instance: id.clone(),
                    concept,
                    reformulation: pass,
                    reason,
                };
                if concept.is_scheduling() != matches!(inst, Instance::Scheduling(_)) {
                    outcome.rejected.push(reject(format!("{concept} does not apply to a {} instance", inst.kind())));
                } else if let Err(reason) = compatibility(concept, pass, config.auto_align) {
                    outcome.rejected.push(reject(reason));
                } else {
                    jobs.push((id, inst, concept, pass));
                }
            }
        }
    }
    let results: Vec<Result<BenchRecord, Rejection>> = jobs
        .par_iter()
        .map(|&(id, inst, concept, pass)| {
            let model = build_milp(inst, concept, pass, config.auto_align).map_err(|e| Rejection {
                instance: id.clone(),
                concept,
                reformulation: pass,
                reason: e.to_string(),
            })?;
            let r = solve_bb(&model, &config.bb);
            Ok(BenchRecord {
                instance: id.clone(),
                concept,
                reformulation: pass,
                status: r.status,
                objective: r.objective,
                bound: r.bound,
                gap: gap_percent(r.objective, r.bound),
                nodes: r.nodes,
                time_s: r.wall_time.as_secs_f64(),
            })
        })
        .collect();
    for r in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(rej) => outcome.rejected.push(rej),
        }
    }
    outcome
}

pub fn write_records_csv(records: &[BenchRecord], w: impl io::Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if records.is_empty() {
        out.write_record(["instance", "concept", "reformulation", "status", "objective", "bound", "gap", "nodes", "time_s"])?;
    }
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records_csv(r: impl io::Read) -> csv::Result<Vec<BenchRecord>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

fn cell(r: &BenchRecord, time_limit: Option<f64>) -> String {
    if r.status.is_solved() {
        return format!("{:.2}", r.time_s);
    }
    let t = time_limit.map_or_else(|| format!("{:.2}", r.time_s), |t| format!("{t}"));
    if r.gap.is_finite() {
        format!("{t}+ ({:.2})", r.gap)
    } else {
        format!("{t}+ (inf)")
    }
}

/// One row per instance: the best objective among solved runs, then one
/// column per variant holding the solve time in seconds, or `T+ (γ)` when
/// the run stopped at limit `T` with percent gap `γ` (`inf` without an
/// incumbent).
pub fn table_csv(records: &[BenchRecord], time_limit: Option<f64>) -> String {
    let mut variants: Vec<String> = Vec::new();
    let mut instances: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(&str, String), &BenchRecord> = BTreeMap::new();
    for r in records {
        let v = r.variant();
        if !variants.contains(&v) {
            variants.push(v.clone());
        }
        if !instances.contains(&r.instance.as_str()) {
            instances.push(&r.instance);
        }
        cells.insert((&r.instance, v), r);
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["instance".to_string(), "optimum".to_string()];
    header.extend(variants.iter().cloned());
    out.write_record(&header).expect("in-memory csv");
    for inst in instances {
        let optimum = records
            .iter()
            .filter(|r| r.instance == inst && r.status.is_solved())
            .filter_map(|r| r.objective)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
        let mut row = vec![inst.to_string(), optimum.map_or(String::new(), |v| format!("{v}"))];
        for v in &variants {
            row.push(cells.get(&(inst, v.clone())).map_or(String::new(), |r| cell(r, time_limit)));
        }
        out.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(out.into_inner().expect("in-memory csv")).expect("utf8")
}
