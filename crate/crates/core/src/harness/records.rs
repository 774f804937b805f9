//! Per-run records and the metadata sidecar written next to them.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::optimizers::Algorithm;

pub const RECORD_HEADER: [&str; 11] = [
    "algorithm",
    "n",
    "rep",
    "run_seed",
    "landscape_seed",
    "budget",
    "iterations",
    "transitions",
    "max_ones",
    "final_ones",
    "wall_ms",
];

/// One run of one algorithm. Field names are the CSV columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub rep: u64,
    pub run_seed: u64,
    pub landscape_seed: u64,
    pub budget: u64,
    pub iterations: u64,
    /// Accepted transitions.
    pub transitions: u64,
    pub max_ones: usize,
    pub final_ones: usize,
    /// 0 unless wall time recording was requested.
    pub wall_ms: u64,
}

impl RunRecord {
    pub fn key(&self) -> (Algorithm, usize, u64) {
        (self.algorithm, self.n, self.rep)
    }
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    // serialize writes the header from the first record; an empty table still gets one
    if records.is_empty() {
        w.write_record(RECORD_HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let missing: Vec<&str> = RECORD_HEADER
        .iter()
        .copied()
        .filter(|c| !headers.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "records CSV lacks columns: {}",
            missing.join(", ")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Writes the config and crate version as TOML: top-level `artifact`,
/// `version` and `records`, plus a `[config]` table in the config file format.
pub fn write_meta(path: &Path, config: &ExperimentConfig, records: usize) -> Result<()> {
    let cfg: Table = config.to_toml_string().parse().expect("own output parses");
    let mut t = Table::new();
    t.insert(
        "artifact".into(),
        Value::String(env!("CARGO_PKG_NAME").into()),
    );
    t.insert(
        "version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    t.insert("records".into(), Value::Integer(records as i64));
    t.insert("config".into(), Value::Table(cfg));
    fs::write(path, toml::to_string(&t).expect("a plain table serializes"))?;
    Ok(())
}

/// Reads a sidecar back into the version string and the config.
pub fn read_meta(path: &Path) -> Result<(String, ExperimentConfig)> {
    let text = fs::read_to_string(path)?;
    let t: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        key: "<document>".into(),
        message: e.to_string(),
    })?;
    let version = t
        .get("version")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse {
            key: "version".into(),
            message: "missing".into(),
        })?
        .to_string();
    let cfg = t
        .get("config")
        .and_then(Value::as_table)
        .ok_or_else(|| Error::Parse {
            key: "config".into(),
            message: "missing table".into(),
        })?;
    let config = ExperimentConfig::from_toml_str(&toml::to_string(cfg).expect("table serializes"))?;
    Ok((version, config))
}
