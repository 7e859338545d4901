//! report.json and kernels.csv.

use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use tempfile::NamedTempFile;

use zigzag_core::backend::{Check, DeltaSummary, RunDetails, RunOutcome, ScenarioConfig};
use zigzag_core::grid::KernelMatrix;

pub const REPORT_FILE: &str = "report.json";
pub const KERNELS_FILE: &str = "kernels.csv";

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch; the only field that differs between
    /// identical runs.
    pub timestamp: u64,
    pub config: &'a ScenarioConfig,
    pub backend: &'static str,
    pub passed: bool,
    pub checks: &'a [Check],
    pub delta: Option<DeltaSummary>,
    pub details: &'a RunDetails,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a ScenarioConfig, outcome: &'a RunOutcome) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config,
            backend: outcome.backend,
            passed: outcome.passed(),
            checks: &outcome.checks,
            delta: outcome.details.delta(),
            details: &outcome.details,
        }
    }
}

/// Writes through a temp file in `dir`, then renames it into place.
fn write_atomic<F>(dir: &Path, name: &str, fill: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<&mut NamedTempFile>) -> io::Result<()>,
{
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(&mut tmp);
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_report(dir: &Path, report: &Report<'_>) -> io::Result<()> {
    write_atomic(dir, REPORT_FILE, |w| {
        serde_json::to_writer_pretty(&mut *w, report)?;
        writeln!(w)
    })
}

pub fn write_kernels(dir: &Path, zigzag: &KernelMatrix, direct: &KernelMatrix) -> io::Result<()> {
    let q = zigzag.grid().points();
    let (z, d) = (zigzag.entries(), direct.entries());
    write_atomic(dir, KERNELS_FILE, |w| {
        writeln!(w, "q_out,q_in,re_zigzag,im_zigzag,re_direct,im_direct")?;
        for j in 0..q.len() {
            for l in 0..q.len() {
                let (a, b) = (z[[j, l]], d[[j, l]]);
                writeln!(w, "{},{},{},{},{},{}", q[j], q[l], a.re, a.im, b.re, b.im)?;
            }
        }
        Ok(())
    })
}
