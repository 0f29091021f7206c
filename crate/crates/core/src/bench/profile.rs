use std::str::FromStr;

use super::BenchRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Instances solved within `t` seconds.
    Time,
    /// Instances whose final percent gap is at most `γ`.
    Gap,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "time" => Ok(Axis::Time),
            "gap" => Ok(Axis::Gap),
            _ => Err(format!("unknown profile axis '{s}' (expected time or gap)")),
        }
    }
}

fn value(r: &BenchRecord, axis: Axis) -> Option<f64> {
    match axis {
        Axis::Time => r.status.is_solved().then_some(r.time_s),
        Axis::Gap => r.objective.map(|_| r.gap).filter(|g| g.is_finite()),
    }
}

/// Cumulative counts per variant at every distinct threshold, plus
/// `virtual_best` (per-instance minimum over variants) and `virtual_worst`
/// (per-instance maximum, only where every variant has a value). Runs
/// without a value, such as time-limited or incumbent-free ones, never
/// count.
pub fn emit_profile(records: &[BenchRecord], axis: Axis) -> String {
    let mut variants: Vec<String> = Vec::new();
    let mut instances: Vec<&str> = Vec::new();
    for r in records {
        let v = r.variant();
        if !variants.contains(&v) {
            variants.push(v);
        }
        if !instances.contains(&r.instance.as_str()) {
            instances.push(&r.instance);
        }
    }
    // values[variant][instance]
    let mut values = vec![vec![None; instances.len()]; variants.len()];
    for r in records {
        let v = variants.iter().position(|v| *v == r.variant()).expect("seen");
        let i = instances.iter().position(|i| *i == r.instance).expect("seen");
        values[v][i] = value(r, axis);
    }
    let per_instance = |pick: fn(f64, f64) -> f64, need_all: bool| -> Vec<Option<f64>> {
        (0..instances.len())
            .map(|i| {
                let vals: Vec<Option<f64>> = values.iter().map(|col| col[i]).collect();
                if need_all && vals.iter().any(Option::is_none) {
                    return None;
                }
                vals.into_iter().flatten().reduce(pick)
            })
            .collect()
    };
    let best = per_instance(f64::min, false);
    let worst = per_instance(f64::max, true);

    let mut thresholds: Vec<f64> = values.iter().flatten().flatten().copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut out = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["threshold".to_string()];
    header.extend(variants.iter().cloned());
    header.push("virtual_best".into());
    header.push("virtual_worst".into());
    out.write_record(&header).expect("in-memory csv");
    let count = |col: &[Option<f64>], t: f64| col.iter().filter(|v| v.is_some_and(|v| v <= t)).count();
    for &t in &thresholds {
        let mut row = vec![format!("{t}")];
        row.extend(values.iter().map(|col| count(col, t).to_string()));
        row.push(count(&best, t).to_string());
        row.push(count(&worst, t).to_string());
        out.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(out.into_inner().expect("in-memory csv")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gap_percent, Concept};
    use crate::gdp::Pass;
    use crate::milp::SolveStatus;

    fn rec(instance: &str, pass: Pass, solved: bool, time_s: f64) -> BenchRecord {
        let (status, objective, bound) =
            if solved { (SolveStatus::Optimal, Some(10.0), 10.0) } else { (SolveStatus::TimeLimit, Some(10.0), 8.0) };
        BenchRecord {
            instance: instance.into(),
            concept: Concept::Ts,
            reformulation: pass,
            status,
            objective,
            bound,
            gap: gap_percent(objective, bound),
            nodes: 1,
            time_s,
        }
    }

    fn rows(csv: &str) -> Vec<Vec<String>> {
        csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
    }

    #[test]
    fn single_variant_reaches_all() {
        let recs = vec![rec("a", Pass::BigM, true, 1.0), rec("b", Pass::BigM, true, 2.0)];
        let p = emit_profile(&recs, Axis::Time);
        assert_eq!(p, "threshold,TS_BM,virtual_best,virtual_worst\n1,1,1,1\n2,2,2,2\n");
    }

    #[test]
    fn time_limited_run_never_counts() {
        let recs = vec![rec("a", Pass::BigM, true, 1.0), rec("b", Pass::BigM, false, 5.0), rec("c", Pass::BigM, true, 2.0)];
        let p = emit_profile(&recs, Axis::Time);
        assert_eq!(rows(&p).last().unwrap()[1], "2");
        // On the gap axis the time-limited run has a finite gap and counts.
        let g = emit_profile(&recs, Axis::Gap);
        assert_eq!(rows(&g).last().unwrap()[1], "3");
    }

    #[test]
    fn envelopes_bracket_the_variants() {
        let recs = vec![
            rec("a", Pass::BigM, true, 1.0),
            rec("a", Pass::Hull, true, 3.0),
            rec("b", Pass::BigM, false, 9.0),
            rec("b", Pass::Hull, true, 2.0),
        ];
        for r in rows(&emit_profile(&recs, Axis::Time)) {
            let n: Vec<usize> = r[1..].iter().map(|v| v.parse().unwrap()).collect();
            let (vars, best, worst) = (&n[..2], n[2], n[3]);
            assert!(vars.iter().all(|&v| best >= v && worst <= v));
        }
    }
}
