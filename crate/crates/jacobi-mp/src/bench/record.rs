use super::BenchError;
use crate::rowwise::ShiftMode;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

/// The solver strategies the harness can sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Serial,
    Row,
    Col,
    Onesided,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Serial => write!(f, "serial"),
            Strategy::Row => write!(f, "row"),
            Strategy::Col => write!(f, "col"),
            Strategy::Onesided => write!(f, "onesided"),
        }
    }
}

/// One benchmark cell. Field order is the CSV column order:
/// `strategy,mode,n,p,rep,wall_seconds,iterations,converged,p2p_bytes,collective_bytes,put_bytes,get_bytes,speedup`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub strategy: Strategy,
    pub mode: Option<ShiftMode>,
    pub n: usize,
    pub p: usize,
    pub rep: usize,
    pub wall_seconds: f64,
    pub iterations: usize,
    pub converged: bool,
    pub p2p_bytes: u64,
    pub collective_bytes: u64,
    pub put_bytes: u64,
    pub get_bytes: u64,
    pub speedup: Option<f64>,
}

/// Fills the `speedup` column: each record is divided into the serial
/// record's wall time for the same `(n, rep)` cell. Records without a serial
/// baseline keep an empty speedup; the serial records themselves come out at
/// exactly 1.
pub fn compute_speedups(records: &mut [BenchRecord]) {
    let baselines: HashMap<(usize, usize), f64> = records
        .iter()
        .filter(|r| r.strategy == Strategy::Serial)
        .map(|r| ((r.n, r.rep), r.wall_seconds))
        .collect();
    for record in records.iter_mut() {
        record.speedup = baselines
            .get(&(record.n, record.rep))
            .map(|serial| serial / record.wall_seconds);
    }
}

pub fn write_records(path: &Path, records: &[BenchRecord]) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path)?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut records = Vec::new();
    for row in reader.deserialize() {
        records.push(row?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(strategy: Strategy, n: usize, p: usize, rep: usize, wall: f64) -> BenchRecord {
        BenchRecord {
            strategy,
            mode: (strategy == Strategy::Row).then_some(ShiftMode::Blocking),
            n,
            p,
            rep,
            wall_seconds: wall,
            iterations: 50,
            converged: false,
            p2p_bytes: 123,
            collective_bytes: 456,
            put_bytes: 0,
            get_bytes: 0,
            speedup: None,
        }
    }

    #[test]
    fn speedup_is_serial_over_parallel() {
        let mut records = vec![
            record(Strategy::Serial, 8, 1, 0, 2.0),
            record(Strategy::Row, 8, 4, 0, 0.5),
        ];
        compute_speedups(&mut records);
        assert_eq!(records[0].speedup, Some(1.0));
        assert_eq!(records[1].speedup, Some(4.0));
    }

    #[test]
    fn missing_baseline_leaves_speedup_empty() {
        let mut records = vec![record(Strategy::Row, 8, 4, 0, 0.5)];
        compute_speedups(&mut records);
        assert_eq!(records[0].speedup, None);
    }

    #[test]
    fn csv_round_trips_field_for_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let mut records = vec![
            record(Strategy::Serial, 8, 1, 0, 0.001953125),
            record(Strategy::Row, 8, 2, 0, 0.0008138020833),
            record(Strategy::Onesided, 16, 4, 1, 3.5e-4),
        ];
        compute_speedups(&mut records);
        write_records(&path, &records).unwrap();
        let reread = read_records(&path).unwrap();
        assert_eq!(reread, records);
    }

    #[test]
    fn csv_header_matches_the_declared_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_records(&path, &[record(Strategy::Row, 8, 2, 0, 1.0)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "strategy,mode,n,p,rep,wall_seconds,iterations,converged,p2p_bytes,collective_bytes,put_bytes,get_bytes,speedup"
        ));
    }
}
