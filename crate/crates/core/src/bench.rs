//! Benchmark records, CSV input/output and Virtual Best Solver aggregation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::BenchError;
use crate::search::{SolveResult, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BenchStatus {
    Sat,
    Unsat,
    Optimum,
    Unknown,
    Error,
}

impl BenchStatus {
    pub fn is_solved(self) -> bool {
        matches!(self, BenchStatus::Sat | BenchStatus::Unsat | BenchStatus::Optimum)
    }
}

impl From<Status> for BenchStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Sat => BenchStatus::Sat,
            Status::Unsat => BenchStatus::Unsat,
            Status::Optimum => BenchStatus::Optimum,
            Status::Unknown => BenchStatus::Unknown,
        }
    }
}

impl fmt::Display for BenchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchStatus::Sat => "SAT",
            BenchStatus::Unsat => "UNSAT",
            BenchStatus::Optimum => "OPTIMUM",
            BenchStatus::Unknown => "UNKNOWN",
            BenchStatus::Error => "ERROR",
        })
    }
}

impl FromStr for BenchStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "SAT" => BenchStatus::Sat,
            "UNSAT" => BenchStatus::Unsat,
            "OPTIMUM" => BenchStatus::Optimum,
            "UNKNOWN" => BenchStatus::Unknown,
            "ERROR" => BenchStatus::Error,
            _ => return Err(format!("unknown status '{s}'")),
        })
    }
}

/// One row of a result CSV: a single (instance, configuration) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub config: String,
    pub status: BenchStatus,
    pub objective: Option<String>,
    pub conflicts: u64,
    pub decisions: u64,
    pub restarts: u64,
    pub reductions: u64,
    pub time_s: f64,
    pub mem_mb: f64,
}

pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "config",
    "status",
    "objective",
    "conflicts",
    "decisions",
    "restarts",
    "reductions",
    "time_s",
    "mem_mb",
];

impl BenchRecord {
    pub fn from_result(instance: &str, config: &str, r: &SolveResult, mem_mb: f64) -> Self {
        BenchRecord {
            instance: instance.to_string(),
            config: config.to_string(),
            status: r.status.into(),
            objective: r.objective.as_ref().map(|o| o.to_string()),
            conflicts: r.stats.conflicts,
            decisions: r.stats.decisions,
            restarts: r.stats.restarts,
            reductions: r.stats.reductions,
            time_s: r.stats.wall_time,
            mem_mb,
        }
    }

    /// A run that did not produce a result.
    pub fn failed(instance: &str, config: &str, status: BenchStatus, time_s: f64) -> Self {
        BenchRecord {
            instance: instance.to_string(),
            config: config.to_string(),
            status,
            objective: None,
            conflicts: 0,
            decisions: 0,
            restarts: 0,
            reductions: 0,
            time_s,
            mem_mb: 0.0,
        }
    }
}

/// CSV writer that flushes after every record.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W) -> Result<Self, BenchError> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        inner.write_record(CSV_HEADER)?;
        inner.flush()?;
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, r: &BenchRecord) -> Result<(), BenchError> {
        self.inner.serialize(r)?;
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_records(w: impl Write, records: &[BenchRecord]) -> Result<(), BenchError> {
    let mut out = RecordWriter::new(w)?;
    for r in records {
        out.write(r)?;
    }
    Ok(())
}

pub fn read_records(r: impl Read) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(BenchError::Invalid(format!(
            "unexpected header {header:?}, expected {CSV_HEADER:?}"
        )));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

pub fn read_records_file(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    read_records(std::fs::File::open(path)?)
}

/// Per-instance best result plus cactus data.
#[derive(Debug, Clone, PartialEq)]
pub struct VbsReport {
    pub vbs: Vec<BenchRecord>,
    /// Solved count per configuration, plus `VBS`.
    pub solved: BTreeMap<String, usize>,
    pub cactus: Vec<CactusPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CactusPoint {
    pub series: String,
    pub solved: usize,
    pub time_s: f64,
}

pub const VBS_NAME: &str = "VBS";

/// Combines result sets. Every configuration must cover the same instances.
pub fn compute_vbs(records: &[BenchRecord]) -> Result<VbsReport, BenchError> {
    let mut by_config: BTreeMap<&str, BTreeMap<&str, &BenchRecord>> = BTreeMap::new();
    for r in records {
        if by_config
            .entry(&r.config)
            .or_default()
            .insert(&r.instance, r)
            .is_some()
        {
            return Err(BenchError::Invalid(format!(
                "duplicate row for instance {} under config {}",
                r.instance, r.config
            )));
        }
    }
    let instances: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let mut mismatches = Vec::new();
    for (config, rows) in &by_config {
        let missing: Vec<&str> = instances
            .iter()
            .filter(|i| !rows.contains_key(*i))
            .copied()
            .collect();
        if !missing.is_empty() {
            mismatches.push(format!("{config} lacks {}", missing.join(", ")));
        }
    }
    if !mismatches.is_empty() {
        return Err(BenchError::InstanceMismatch(mismatches.join("; ")));
    }

    let mut vbs = Vec::new();
    for inst in &instances {
        let candidates = by_config.values().map(|rows| rows[inst]);
        let best = candidates
            .clone()
            .filter(|r| r.status.is_solved())
            .min_by(|a, b| a.time_s.total_cmp(&b.time_s));
        let row = match best {
            Some(r) => r.clone(),
            None => {
                let time = candidates.map(|r| r.time_s).fold(f64::NAN, f64::max);
                let mut r = BenchRecord::failed(inst, VBS_NAME, BenchStatus::Unknown, time);
                r.time_s = if r.time_s.is_nan() { 0.0 } else { r.time_s };
                r
            }
        };
        vbs.push(row);
    }

    let mut solved = BTreeMap::new();
    let mut cactus = Vec::new();
    let series = by_config
        .iter()
        .map(|(c, rows)| (c.to_string(), rows.values().copied().collect::<Vec<_>>()))
        .chain(std::iter::once((VBS_NAME.to_string(), vbs.iter().collect())));
    for (name, rows) in series {
        let mut times: Vec<f64> = rows
            .iter()
            .filter(|r| r.status.is_solved())
            .map(|r| r.time_s)
            .collect();
        times.sort_by(f64::total_cmp);
        solved.insert(name.clone(), times.len());
        cactus.extend(times.into_iter().enumerate().map(|(i, t)| CactusPoint {
            series: name.clone(),
            solved: i + 1,
            time_s: t,
        }));
    }
    Ok(VbsReport { vbs, solved, cactus })
}

pub fn write_cactus(w: impl Write, points: &[CactusPoint]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    for p in points {
        out.serialize(p)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, config: &str, status: BenchStatus, time: f64) -> BenchRecord {
        let mut r = BenchRecord::failed(instance, config, status, time);
        r.conflicts = 7;
        r
    }

    #[test]
    fn vbs_picks_the_fastest_solver() {
        use BenchStatus::*;
        let rows = vec![
            rec("i1", "A", Sat, 5.0),
            rec("i1", "B", Sat, 3.0),
            rec("i2", "A", Unsat, 2.0),
            rec("i2", "B", Unknown, 10.0),
            rec("i3", "A", Unknown, 10.0),
            rec("i3", "B", Error, 1.0),
        ];
        let rep = compute_vbs(&rows).unwrap();
        assert_eq!(rep.vbs[0].config, "B");
        assert_eq!(rep.vbs[0].time_s, 3.0);
        assert_eq!(rep.vbs[1].config, "A");
        assert_eq!(rep.vbs[2].status, Unknown);
        assert_eq!(rep.solved["VBS"], 2);
        assert_eq!(rep.solved["A"], 2);
        assert_eq!(rep.solved["B"], 1);
        assert_eq!(rep.cactus.iter().filter(|p| p.series == "VBS").count(), 2);
    }

    #[test]
    fn mismatched_instance_sets_are_rejected() {
        let rows = vec![
            rec("i1", "A", BenchStatus::Sat, 1.0),
            rec("i2", "B", BenchStatus::Sat, 1.0),
        ];
        match compute_vbs(&rows) {
            Err(BenchError::InstanceMismatch(m)) => assert!(m.contains("A lacks i2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut r = rec("a.opb", "sat4j-gr-best", BenchStatus::Optimum, 0.25);
        r.objective = Some("-3".into());
        let rows = vec![r, rec("b.opb", "x", BenchStatus::Error, 0.0)];
        let mut buf = Vec::new();
        write_records(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("instance,config,status,objective,conflicts,decisions,restarts,reductions,time_s,mem_mb\n"));
        assert_eq!(read_records(&buf[..]).unwrap(), rows);
    }
}
