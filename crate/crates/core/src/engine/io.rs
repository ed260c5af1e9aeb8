//! Sample persistence: `sample_index,alpha,lo,hi,status` CSV plus a JSON sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EngineError, FuzzySample, Outcome, Plan, Record};
use crate::possibility::Interval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub plan: Plan,
    pub config_digest: String,
    pub records: usize,
    pub failures: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    sample_index: usize,
    alpha: f64,
    lo: Option<f64>,
    hi: Option<f64>,
    status: String,
}

fn io_err(e: impl std::fmt::Display) -> EngineError {
    EngineError::Io(e.to_string())
}

pub fn write_sample(sample: &FuzzySample, csv_path: &Path, sidecar_path: &Path) -> Result<(), EngineError> {
    let mut w = csv::Writer::from_path(csv_path).map_err(io_err)?;
    for r in &sample.records {
        let (lo, hi, status) = match &r.outcome {
            Outcome::Ok(iv) => (Some(iv.lo), Some(iv.hi), "ok".to_string()),
            Outcome::Failed(kind) => (None, None, kind.clone()),
        };
        w.serialize(Row { sample_index: r.sample_index, alpha: r.alpha, lo, hi, status }).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    let sidecar = SampleSidecar {
        plan: sample.plan.clone(),
        config_digest: sample.config_digest.clone(),
        records: sample.records.len(),
        failures: sample.failure_count(),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(io_err)?;
    std::fs::write(sidecar_path, json).map_err(io_err)
}

pub fn read_sample(csv_path: &Path, sidecar_path: &Path) -> Result<FuzzySample, EngineError> {
    let text = std::fs::read_to_string(sidecar_path).map_err(io_err)?;
    let sidecar: SampleSidecar = serde_json::from_str(&text).map_err(io_err)?;
    let mut rdr = csv::Reader::from_path(csv_path).map_err(io_err)?;
    let mut records = Vec::new();
    for row in rdr.deserialize() {
        let row: Row = row.map_err(io_err)?;
        let outcome = match (row.status.as_str(), row.lo, row.hi) {
            ("ok", Some(lo), Some(hi)) => Outcome::Ok(Interval { lo, hi }),
            ("ok", _, _) => return Err(EngineError::Io(format!("row {} has status ok but no bounds", records.len()))),
            (kind, _, _) => Outcome::Failed(kind.to_string()),
        };
        records.push(Record { sample_index: row.sample_index, alpha: row.alpha, outcome });
    }
    if records.len() != sidecar.records {
        return Err(EngineError::Io(format!(
            "sidecar announces {} records, CSV holds {}",
            sidecar.records,
            records.len()
        )));
    }
    Ok(FuzzySample { records, plan: sidecar.plan, config_digest: sidecar.config_digest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::AlphaSchedule;
    use proptest::prelude::*;

    fn plan() -> Plan {
        Plan {
            sample_size: 3,
            alpha_schedule: AlphaSchedule::RandomAlpha { alphas: vec![0.1, 0.30000000000000004, 0.9] },
            eval_count: 3,
            rank_from_top: None,
            achieved_confidence: None,
            seed: 1,
            config_digest: "abc".into(),
            warnings: vec![],
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_bitwise(values in prop::collection::vec((any::<f64>(), 0.0..1e6f64, any::<bool>()), 1..20)) {
            let records: Vec<Record> = values.iter().enumerate().map(|(i, &(lo, w, ok))| {
                let lo = if lo.is_finite() { lo } else { 0.5 };
                Record {
                    sample_index: i,
                    alpha: 1.0 / (i as f64 + 3.0),
                    outcome: if ok { Outcome::Ok(Interval { lo, hi: lo + w }) } else { Outcome::Failed("domain".into()) },
                }
            }).collect();
            let sample = FuzzySample { records, plan: plan(), config_digest: "abc".into() };
            let dir = tempfile::tempdir().unwrap();
            let (c, j) = (dir.path().join("s.csv"), dir.path().join("s.json"));
            write_sample(&sample, &c, &j).unwrap();
            prop_assert_eq!(read_sample(&c, &j).unwrap(), sample);
        }
    }
}
