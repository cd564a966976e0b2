use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use adjpile::hull::HullReport;
use adjpile::SortReport;
use anyhow::{Context, Result};
use serde::Serialize;

/// One measured run; a JSON line on the metrics stream or a CSV row from `bench`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsRecord {
    pub algorithm: String,
    pub n: usize,
    pub s: usize,
    pub sbar: usize,
    pub comparisons: u64,
    pub element_reads: u64,
    pub peak_workspace_bits: u64,
    pub wall_time_ns: u64,
}

impl MetricsRecord {
    pub fn from_sort(algorithm: &str, s: usize, r: &SortReport, wall_time_ns: u64) -> Self {
        Self {
            algorithm: algorithm.to_owned(),
            n: r.output_length,
            s,
            sbar: r.sbar,
            comparisons: r.comparisons,
            element_reads: r.element_reads,
            peak_workspace_bits: r.peak_workspace_bits,
            wall_time_ns,
        }
    }

    pub fn from_hull(algorithm: &str, n: usize, s: usize, r: &HullReport, wall_time_ns: u64) -> Self {
        Self {
            algorithm: algorithm.to_owned(),
            n,
            s,
            sbar: r.sbar,
            comparisons: r.comparisons,
            element_reads: r.point_reads,
            peak_workspace_bits: r.peak_workspace_bits,
            wall_time_ns,
        }
    }
}

/// Appends `record` as one JSON line to `path`, or to stderr without a path.
pub fn emit(path: Option<&Path>, record: &MetricsRecord) -> Result<()> {
    let line = serde_json::to_string(record)?;
    match path {
        Some(p) => {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .with_context(|| format!("opening metrics file {}", p.display()))?;
            writeln!(f, "{line}")?;
        }
        None => writeln!(io::stderr(), "{line}")?,
    }
    Ok(())
}
