//! Instance files, MPS export, benchmark runs and performance profiles.

mod instance;
mod mps;
mod profile;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{
    build_gp, build_gp_strengthened, build_ip, build_strip, build_ts, InstanceError, SchedulingInstance,
    StripInstance, StripVariant,
};
use crate::gdp::{GdpModel, MilpModel, Pass};
use crate::reformulate::{reformulate, ReformError};

pub use instance::{instance_to_json, load_instance, parse_instance, save_instance, InstanceFileError};
pub use mps::{export_mps, mps_string, write_mps};
pub use profile::{emit_profile, Axis};
pub use run::{
    compatibility, gap_percent, read_records_csv, run_bench, table_csv, write_records_csv, BenchConfig,
    BenchOutcome, BenchRecord, Rejection,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Instance {
    Scheduling(SchedulingInstance),
    Strip(StripInstance),
}

impl Instance {
    pub fn len(&self) -> usize {
        match self {
            Instance::Scheduling(s) => s.len(),
            Instance::Strip(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Scheduling(_) => "scheduling",
            Instance::Strip(_) => "strip",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Concept {
    #[serde(rename = "GP")]
    Gp,
    #[serde(rename = "GP_S")]
    GpStrengthened,
    #[serde(rename = "IP")]
    Ip,
    #[serde(rename = "TS")]
    Ts,
    #[serde(rename = "S_original")]
    StripOriginal,
    #[serde(rename = "S_symbreak")]
    StripSymBreak,
    S0,
    S1,
}

impl Concept {
    pub const ALL: [Concept; 8] = [
        Concept::Gp,
        Concept::GpStrengthened,
        Concept::Ip,
        Concept::Ts,
        Concept::StripOriginal,
        Concept::StripSymBreak,
        Concept::S0,
        Concept::S1,
    ];
    pub const SCHEDULING: [Concept; 4] = [Concept::Gp, Concept::GpStrengthened, Concept::Ip, Concept::Ts];
    pub const STRIP: [Concept; 4] = [Concept::StripOriginal, Concept::StripSymBreak, Concept::S0, Concept::S1];

    pub fn label(self) -> &'static str {
        match self {
            Concept::Gp => "GP",
            Concept::GpStrengthened => "GP_S",
            Concept::Ip => "IP",
            Concept::Ts => "TS",
            Concept::StripOriginal => "S_original",
            Concept::StripSymBreak => "S_symbreak",
            Concept::S0 => "S0",
            Concept::S1 => "S1",
        }
    }

    pub fn is_scheduling(self) -> bool {
        Concept::SCHEDULING.contains(&self)
    }

    /// Whether every disjunction of the concept shares its left-hand sides
    /// as built, so the reaggregated hull applies without alignment.
    pub fn shares_lhs(self) -> bool {
        matches!(self, Concept::GpStrengthened | Concept::Ts | Concept::S0 | Concept::S1)
    }

    fn strip_variant(self) -> Option<StripVariant> {
        match self {
            Concept::StripOriginal => Some(StripVariant::Original),
            Concept::StripSymBreak => Some(StripVariant::SymBreak),
            Concept::S0 => Some(StripVariant::S0),
            Concept::S1 => Some(StripVariant::S1),
            _ => None,
        }
    }

    pub fn build(self, instance: &Instance) -> Result<GdpModel, BenchError> {
        let model = match (self, instance) {
            (Concept::Gp, Instance::Scheduling(s)) => build_gp(s)?,
            (Concept::GpStrengthened, Instance::Scheduling(s)) => build_gp_strengthened(s)?,
            (Concept::Ip, Instance::Scheduling(s)) => build_ip(s)?,
            (Concept::Ts, Instance::Scheduling(s)) => build_ts(s)?,
            (c, Instance::Strip(s)) if !c.is_scheduling() => build_strip(s, c.strip_variant().expect("strip concept"))?,
            (c, i) => return Err(BenchError::KindMismatch { concept: c, kind: i.kind() }),
        };
        Ok(model)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Concept::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown concept '{s}'"))
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Reform(#[from] ReformError),
    #[error("concept {concept} does not apply to a {kind} instance")]
    KindMismatch { concept: Concept, kind: &'static str },
    #[error("{0}")]
    Incompatible(String),
}

/// Build the concept's GDP for `instance` and lower it with `pass`.
pub fn build_milp(instance: &Instance, concept: Concept, pass: Pass, auto_align: bool) -> Result<MilpModel, BenchError> {
    compatibility(concept, pass, auto_align).map_err(BenchError::Incompatible)?;
    let gdp = concept.build(instance)?;
    Ok(reformulate(&gdp, pass, auto_align)?)
}
