//! CSV and JSON artifacts.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a file
//! read back and written again is byte-identical.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::montecarlo::{AngleRecord, DistanceBin, DistanceStats, PLoSCurve};
use crate::pathloss::FitResult;

/// I/O failures keep the path in the message.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Model(#[from] Error),
}

fn fs_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Fs {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv {
        path: path.display().to_string(),
        source,
    }
}

pub const CURVE_HEADER: [&str; 6] = ["theta_deg", "p_los", "p_nlos_b", "p_nlos_t", "p_nlos_s", "n"];
pub const DISTANCE_HEADER: [&str; 6] = ["bin_center_m", "p_los", "p_nlos_b", "p_nlos_t", "p_nlos_s", "n"];
pub const FIT_HEADER: [&str; 6] = ["environment", "scenario", "A_dB", "B", "rmse_dB", "n"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProbRow {
    key: f64,
    p_los: f64,
    p_nlos_b: f64,
    p_nlos_t: f64,
    p_nlos_s: f64,
    n: u64,
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: &[ProbRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read>(input: R, header: &[&str]) -> std::result::Result<Vec<ProbRow>, String> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let got: Vec<String> = r
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if got != header {
        return Err(format!("expected columns {header:?}, found {got:?}"));
    }
    r.records()
        .map(|rec| {
            rec.and_then(|rec| rec.deserialize(None))
                .map_err(|e| e.to_string())
        })
        .collect()
}

pub fn write_curve<W: Write>(out: W, curve: &PLoSCurve) -> csv::Result<()> {
    let rows: Vec<ProbRow> = curve
        .records
        .iter()
        .map(|r| ProbRow {
            key: r.theta_deg,
            p_los: r.p_los,
            p_nlos_b: r.p_nlos_b,
            p_nlos_t: r.p_nlos_t,
            p_nlos_s: r.p_nlos_s,
            n: r.total_count,
        })
        .collect();
    write_rows(out, &CURVE_HEADER, &rows)
}

pub fn read_curve<R: Read>(input: R) -> std::result::Result<PLoSCurve, String> {
    let rows = read_rows(input, &CURVE_HEADER)?;
    Ok(PLoSCurve {
        records: rows
            .into_iter()
            .map(|r| AngleRecord {
                theta_deg: r.key,
                los_count: (r.p_los * r.n as f64).round() as u64,
                total_count: r.n,
                p_los: r.p_los,
                p_nlos_b: r.p_nlos_b,
                p_nlos_t: r.p_nlos_t,
                p_nlos_s: r.p_nlos_s,
            })
            .collect(),
    })
}

pub fn write_distance<W: Write>(out: W, stats: &DistanceStats) -> csv::Result<()> {
    let rows: Vec<ProbRow> = stats
        .bins
        .iter()
        .map(|b| ProbRow {
            key: b.center(),
            p_los: b.p_los,
            p_nlos_b: b.p_nlos_b,
            p_nlos_t: b.p_nlos_t,
            p_nlos_s: b.p_nlos_s,
            n: b.count,
        })
        .collect();
    write_rows(out, &DISTANCE_HEADER, &rows)
}

/// Reads distance bins; the bin width is not stored in the file.
pub fn read_distance<R: Read>(input: R, bin_width: f64) -> std::result::Result<DistanceStats, String> {
    let rows = read_rows(input, &DISTANCE_HEADER)?;
    Ok(DistanceStats {
        bin_width,
        bins: rows
            .into_iter()
            .map(|r| DistanceBin {
                lo: r.key - 0.5 * bin_width,
                hi: r.key + 0.5 * bin_width,
                count: r.n,
                p_los: r.p_los,
                p_nlos_b: r.p_nlos_b,
                p_nlos_t: r.p_nlos_t,
                p_nlos_s: r.p_nlos_s,
                mean_distance: r.key,
            })
            .collect(),
    })
}

/// One row of a fit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub environment: String,
    pub scenario: String,
    #[serde(rename = "A_dB")]
    pub a_db: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "rmse_dB")]
    pub rmse_db: f64,
    pub n: usize,
}

impl FitRow {
    pub fn new(environment: &str, scenario: &str, fit: &FitResult) -> Self {
        FitRow {
            environment: environment.to_string(),
            scenario: scenario.to_string(),
            a_db: fit.a,
            b: fit.b,
            rmse_db: fit.rmse,
            n: fit.n_points,
        }
    }
}

pub fn write_fits<W: Write>(out: W, rows: &[FitRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(FIT_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fits<R: Read>(input: R) -> std::result::Result<Vec<FitRow>, String> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(|e| e.to_string())).collect()
}

/// Writes a CSV produced by `f` into `path`.
pub fn write_csv_file(
    path: &Path,
    f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>,
) -> std::result::Result<(), IoError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(csv_err(path))?;
    fs::write(path, buf).map_err(fs_err(path))
}

pub fn read_file(path: &Path) -> std::result::Result<Vec<u8>, IoError> {
    fs::read(path).map_err(fs_err(path))
}

pub fn read_curve_file(path: &Path) -> std::result::Result<PLoSCurve, IoError> {
    read_curve(read_file(path)?.as_slice()).map_err(|message| IoError::Format {
        path: path.display().to_string(),
        message,
    })
}

pub fn read_distance_file(path: &Path, bin_width: f64) -> std::result::Result<DistanceStats, IoError> {
    read_distance(read_file(path)?.as_slice(), bin_width).map_err(|message| IoError::Format {
        path: path.display().to_string(),
        message,
    })
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), IoError> {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    fs::write(path, s).map_err(fs_err(path))
}

pub fn write_text_file(path: &Path, text: &str) -> std::result::Result<(), IoError> {
    fs::write(path, text).map_err(fs_err(path))
}

pub fn create_dir(path: &Path) -> std::result::Result<(), IoError> {
    fs::create_dir_all(path).map_err(fs_err(path))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
