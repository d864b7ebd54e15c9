//! Image I/O, experiment configuration and orchestration, and report output.

pub mod config;
pub mod correlate;
pub mod experiment;
pub mod pnm;
pub mod report;
pub mod synth;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use config::{AlgorithmId, ExperimentConfig, ImageSource};
pub use experiment::{run_experiment, ExperimentSummary, RunOutcome, RunRecord};

/// Writes `bytes` to a sibling temporary file and renames it over `path`, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d.display().to_string(), e))?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let ctx = || tmp.display().to_string();
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(ctx(), e))?;
    f.write_all(bytes).map_err(|e| Error::io(ctx(), e))?;
    f.sync_all().map_err(|e| Error::io(ctx(), e))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Serializes rows to CSV in memory.
pub fn csv_bytes<S: serde::Serialize>(rows: &[S]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("csv buffer", e.into_error()))
}

pub fn write_csv<S: serde::Serialize>(path: &Path, rows: &[S]) -> Result<()> {
    write_atomic(path, &csv_bytes(rows)?)
}

pub fn write_json<S: serde::Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
