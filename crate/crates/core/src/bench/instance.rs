use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::Instance;
use crate::builders::{InstanceError, Job, Rect, SchedulingInstance, StripInstance};

#[derive(Debug, Error)]
pub enum InstanceFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchedulingFile {
    jobs: Vec<Job>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StripFile {
    #[serde(rename = "W")]
    width: f64,
    #[serde(rename = "UB")]
    ub: Option<f64>,
    rects: Vec<Rect>,
}

#[derive(Serialize)]
struct StripOut<'a> {
    #[serde(rename = "W")]
    width: f64,
    #[serde(rename = "UB")]
    ub: f64,
    rects: &'a [Rect],
}

fn syntax(e: serde_json::Error) -> InstanceFileError {
    InstanceFileError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parse `{"jobs": [{"p", "r", "d"}, ...]}` or
/// `{"W", "UB"?, "rects": [{"L", "H"}, ...]}`; a missing `UB` becomes `Σ L`.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceFileError> {
    let value: Value = serde_json::from_str(text).map_err(syntax)?;
    let Value::Object(map) = &value else {
        return Err(InstanceFileError::Schema("top level must be an object".into()));
    };
    let instance = if map.contains_key("jobs") {
        let file: SchedulingFile =
            serde_json::from_value(value).map_err(|e| InstanceFileError::Schema(e.to_string()))?;
        let inst = SchedulingInstance { jobs: file.jobs };
        inst.validate()?;
        Instance::Scheduling(inst)
    } else if map.contains_key("rects") {
        let file: StripFile = serde_json::from_value(value).map_err(|e| InstanceFileError::Schema(e.to_string()))?;
        let ub = file.ub.unwrap_or_else(|| file.rects.iter().map(|r| r.l).sum());
        let inst = StripInstance { rects: file.rects, width: file.width, ub };
        inst.validate()?;
        Instance::Strip(inst)
    } else {
        return Err(InstanceFileError::Schema("expected a \"jobs\" or a \"rects\" field".into()));
    };
    Ok(instance)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| InstanceFileError::Io { path: path.display().to_string(), source })?;
    parse_instance(&text)
}

pub fn instance_to_json(instance: &Instance) -> String {
    let text = match instance {
        Instance::Scheduling(s) => serde_json::to_string_pretty(s),
        Instance::Strip(s) => serde_json::to_string_pretty(&StripOut { width: s.width, ub: s.ub, rects: &s.rects }),
    };
    text.expect("instances serialize") + "\n"
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<(), InstanceFileError> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(instance))
        .map_err(|source| InstanceFileError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_jobs() {
        let i = parse_instance(r#"{"jobs":[{"p":3,"r":0,"d":10},{"p":2,"r":0,"d":10}]}"#).unwrap();
        assert_eq!(i, Instance::Scheduling(SchedulingInstance::new([(3.0, 0.0, 10.0), (2.0, 0.0, 10.0)])));
    }

    #[test]
    fn strip_default_bound() {
        let Instance::Strip(s) = parse_instance(r#"{"W":5,"rects":[{"L":3,"H":1},{"L":4,"H":2}]}"#).unwrap() else {
            panic!("expected strip")
        };
        assert_eq!(s.ub, 7.0);
    }

    #[test]
    fn infeasible_job_names_index() {
        let err = parse_instance(r#"{"jobs":[{"p":5,"r":0,"d":4}]}"#).unwrap_err();
        assert!(matches!(err, InstanceFileError::Invalid(InstanceError::InfeasibleJob { index: 0, .. })));
        assert!(err.to_string().contains("job 0"));
    }

    #[test]
    fn diagnostics_point_at_the_problem() {
        let err = parse_instance("{\"jobs\": [\n  {\"p\": 3, \"r\": 0,}\n]}").unwrap_err();
        assert!(matches!(err, InstanceFileError::Syntax { line: 2, .. }), "{err}");
        let err = parse_instance(r#"{"jobs":[{"p":3,"r":0}]}"#).unwrap_err();
        assert!(err.to_string().contains("`d`"), "{err}");
        let err = parse_instance(r#"{"W":5,"rects":[{"L":3,"H":9}]}"#).unwrap_err();
        assert!(err.to_string().contains("rectangle 0"), "{err}");
        assert!(matches!(parse_instance("[1]").unwrap_err(), InstanceFileError::Schema(_)));
    }

    #[test]
    fn json_round_trip() {
        for text in [r#"{"jobs":[{"p":3,"r":0,"d":10}]}"#, r#"{"W":5,"UB":9,"rects":[{"L":3,"H":1}]}"#] {
            let i = parse_instance(text).unwrap();
            assert_eq!(parse_instance(&instance_to_json(&i)).unwrap(), i);
        }
    }
}
