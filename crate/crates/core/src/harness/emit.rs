//! CSV and JSON output with a metadata block.
//!
//! JSON documents carry `{"metadata": …, "data": …}`; CSV files get a
//! `<file>.meta.json` sidecar.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ConvolutionRow, DivergenceRow, DivisorSample, LipschitzRow};
use crate::error::{Error, Result};
use crate::xsb::GainRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub blow_up_threshold: f64,
    pub max_dt: f64,
}

impl Metadata {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed,
            version: crate::VERSION.into(),
            blow_up_threshold: crate::dynamics::BLOW_UP_THRESHOLD,
            max_dt: crate::dynamics::MAX_DT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidParameter(format!("unknown format {s}"))),
        }
    }
}

/// Rows with a fixed column order.
pub trait Table {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

#[derive(Serialize, Deserialize)]
struct Document<T> {
    metadata: Metadata,
    data: T,
}

/// Header line always, then one line per row.
pub fn write_csv<R: Table, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, meta: &Metadata, mut out: W) -> Result<()> {
    let doc = Document {
        metadata: meta.clone(),
        data: value,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned, R: Read>(input: R) -> Result<(Metadata, T)> {
    let doc: Document<T> = serde_json::from_reader(input)?;
    Ok((doc.metadata, doc.data))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn emit_csv<R: Table>(rows: &[R], path: &Path, meta: &Metadata) -> Result<()> {
    write_csv(rows, BufWriter::new(File::create(path)?))?;
    let mut side = BufWriter::new(File::create(sidecar(path))?);
    serde_json::to_writer_pretty(&mut side, meta)?;
    side.write_all(b"\n")?;
    side.flush()?;
    Ok(())
}

pub fn emit_json<T: Serialize>(value: &T, path: &Path, meta: &Metadata) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_json(value, meta, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn emit<R: Table + Serialize>(rows: &[R], format: Format, path: &Path, meta: &Metadata) -> Result<()> {
    match format {
        Format::Csv => emit_csv(rows, path, meta),
        Format::Json => emit_json(&rows, path, meta),
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

impl Table for DivergenceRow {
    fn header() -> Vec<&'static str> {
        vec!["n", "n_prime", "distance", "predicted_phase_gap", "phase_drift", "window_end"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.n_prime.to_string(),
            num(self.distance),
            num(self.predicted_phase_gap),
            num(self.phase_drift),
            num(self.window_end),
        ]
    }
}

impl Table for LipschitzRow {
    fn header() -> Vec<&'static str> {
        vec!["direction", "scale", "ratio"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.direction.to_string(), num(self.scale), num(self.ratio)]
    }
}

impl Table for DivisorSample {
    fn header() -> Vec<&'static str> {
        vec!["k", "q", "rho", "count"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.k.to_string(), self.q.to_string(), num(self.rho), self.count.to_string()]
    }
}

impl Table for ConvolutionRow {
    fn header() -> Vec<&'static str> {
        vec!["a", "b", "lhs", "ratio"]
    }

    fn record(&self) -> Vec<String> {
        vec![num(self.a), num(self.b), num(self.lhs), num(self.ratio)]
    }
}

impl Table for GainRow {
    fn header() -> Vec<&'static str> {
        vec!["T", "numerator", "denominator", "ratio", "resolved"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            num(self.big_t),
            num(self.numerator),
            num(self.denominator),
            num(self.ratio),
            self.resolved.to_string(),
        ]
    }
}
