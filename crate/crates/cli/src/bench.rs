//! Trade-off grid: one metrics row per (N, S, algorithm) cell.

use std::io::Write;
use std::time::Instant;

use adjpile::gen::{distinct_values, points, HullShape};
use adjpile::hull::{chan_chen_upper_hull, upper_hull};
use adjpile::{pq_sort, ElementSource, OutputSink, PileKind, PointSource};
use anyhow::{bail, Result};
use clap::ValueEnum;

use crate::metrics::MetricsRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    TournamentSort,
    NavpileSort,
    RebuildingSort,
    OurHull,
    ChanChenHull,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::TournamentSort => "tournament-sort",
            Algorithm::NavpileSort => "navpile-sort",
            Algorithm::RebuildingSort => "rebuilding-sort",
            Algorithm::OurHull => "our-hull",
            Algorithm::ChanChenHull => "chan-chen-hull",
        }
    }
}

pub struct Grid {
    pub ns: Vec<usize>,
    pub ss: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub shape: HullShape,
    /// Without timing every column is a pure function of the grid and seed.
    pub timing: bool,
}

fn cell(grid: &Grid, algorithm: Algorithm, n: usize, s: usize) -> Result<MetricsRecord> {
    let started = Instant::now();
    let elapsed = |t: Instant| if grid.timing { t.elapsed().as_nanos() as u64 } else { 0 };
    let sort_kind = match algorithm {
        Algorithm::TournamentSort => Some(PileKind::Tournament),
        Algorithm::NavpileSort => Some(PileKind::Navigation),
        Algorithm::RebuildingSort => Some(PileKind::Rebuilding),
        _ => None,
    };
    if let Some(kind) = sort_kind {
        let data = distinct_values(n, grid.seed);
        let src = if kind == PileKind::Rebuilding { ElementSource::streaming(data) } else { ElementSource::new(data) };
        let mut sink = OutputSink::new();
        let started = Instant::now();
        let report = pq_sort(&src, s, &mut sink, kind)?;
        return Ok(MetricsRecord::from_sort(algorithm.tag(), s, &report, elapsed(started)));
    }
    let src = PointSource::new(points(grid.shape, n, grid.seed))?;
    let mut sink = OutputSink::new();
    let report = match algorithm {
        Algorithm::OurHull => upper_hull(&src, s, &mut sink)?,
        _ => chan_chen_upper_hull(&src, s, &mut sink)?,
    };
    Ok(MetricsRecord::from_hull(algorithm.tag(), n, s, &report, elapsed(started)))
}

/// Runs every cell in grid order and writes the CSV to `out`.
pub fn run(grid: &Grid, out: impl Write) -> Result<usize> {
    if grid.ns.is_empty() || grid.ss.is_empty() || grid.algorithms.is_empty() {
        bail!("the bench grid needs at least one N, one S and one algorithm");
    }
    if let Some(&s) = grid.ss.iter().find(|&&s| s == 0) {
        bail!("workspace target S = {s} must be at least 1");
    }
    let mut writer = csv::Writer::from_writer(out);
    let mut rows = 0;
    for &n in &grid.ns {
        for &s in &grid.ss {
            for &algorithm in &grid.algorithms {
                // The baseline keeps a two-point stack, so it needs S ≥ 2.
                if algorithm == Algorithm::ChanChenHull && s < 2 {
                    continue;
                }
                writer.serialize(cell(grid, algorithm, n, s)?)?;
                rows += 1;
            }
        }
    }
    writer.flush()?;
    Ok(rows)
}
