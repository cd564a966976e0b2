//! Priority-queue sort: insert every index, then repeatedly print and extract the minimum.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::{ceil_log2, Geometry};
use crate::model::{KeySource, OutputSink, WorkspaceMeter};
use crate::navpile::{Mode, NavigationPile};
use crate::rebuild::RebuildingPile;
use crate::tournament::TournamentTree;

/// The monotone min-pile interface shared by the three structures.
pub trait PriorityQueue {
    fn insert(&mut self, i: usize) -> Result<()>;
    fn minimum(&self) -> Option<usize>;
    fn extract(&mut self, j: usize) -> Result<()>;
    /// Completes deferred work once no further inserts will come.
    fn settle(&mut self);
}

impl<S: KeySource> PriorityQueue for TournamentTree<'_, S> {
    fn insert(&mut self, i: usize) -> Result<()> {
        TournamentTree::insert(self, i)
    }
    fn minimum(&self) -> Option<usize> {
        TournamentTree::minimum(self)
    }
    fn extract(&mut self, j: usize) -> Result<()> {
        TournamentTree::extract(self, j)
    }
    fn settle(&mut self) {
        TournamentTree::settle(self)
    }
}

impl<S: KeySource> PriorityQueue for NavigationPile<'_, S> {
    fn insert(&mut self, i: usize) -> Result<()> {
        NavigationPile::insert(self, i)
    }
    fn minimum(&self) -> Option<usize> {
        NavigationPile::minimum(self)
    }
    fn extract(&mut self, j: usize) -> Result<()> {
        NavigationPile::extract(self, j)
    }
    fn settle(&mut self) {
        NavigationPile::settle(self)
    }
}

impl<S: KeySource> PriorityQueue for RebuildingPile<'_, S> {
    fn insert(&mut self, i: usize) -> Result<()> {
        RebuildingPile::insert(self, i)
    }
    fn minimum(&self) -> Option<usize> {
        RebuildingPile::minimum(self)
    }
    fn extract(&mut self, j: usize) -> Result<()> {
        RebuildingPile::extract(self, j)
    }
    fn settle(&mut self) {
        self.seal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PileKind {
    Tournament,
    Navigation,
    Rebuilding,
}

impl PileKind {
    pub const ALL: [PileKind; 3] = [PileKind::Tournament, PileKind::Navigation, PileKind::Rebuilding];

    pub fn name(self) -> &'static str {
        match self {
            PileKind::Tournament => "tournament",
            PileKind::Navigation => "navpile",
            PileKind::Rebuilding => "rebuilding",
        }
    }
}

impl fmt::Display for PileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PileKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tournament" => Ok(PileKind::Tournament),
            "navpile" | "navigation" => Ok(PileKind::Navigation),
            "rebuilding" => Ok(PileKind::Rebuilding),
            other => Err(format!("unknown pile kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortReport {
    pub comparisons: u64,
    pub element_reads: u64,
    /// Watermark tests, kept apart from `comparisons`.
    pub liveness_tests: u64,
    pub peak_workspace_bits: u64,
    pub output_length: usize,
    /// Rounded workspace target; 0 for an empty input.
    pub sbar: usize,
    /// Largest number of element reads spent by one extract.
    pub max_extract_reads: u64,
    pub rebuilds: usize,
    /// Set when `S < ⌈lg N⌉`.
    pub below_regime: bool,
}

/// Sorts `src` into `sink` with a pile of workspace target `s`.
///
/// Tournament and navigation piles need the input length; the rebuilding pile
/// also accepts a stream.
pub fn pq_sort<S: KeySource>(src: &S, s: usize, sink: &mut OutputSink<S::Key>, kind: PileKind) -> Result<SortReport> {
    let c = src.counters();
    let (reads0, cmp0, live0) = (c.reads(), c.comparisons(), c.liveness_tests());
    let meter = WorkspaceMeter::new();
    let known = src.len_hint();
    let mut report = SortReport::default();
    match kind {
        PileKind::Tournament | PileKind::Navigation => {
            let n = known.ok_or(Error::UnknownLength)?;
            if n > 0 {
                report.sbar = Geometry::new(n, s).sbar;
                report.below_regime = s < ceil_log2(n) as usize;
                if kind == PileKind::Tournament {
                    let mut pile = TournamentTree::new(src, n, s, &meter);
                    run(src, &mut pile, sink, &mut report)?;
                } else {
                    let mut pile = NavigationPile::new(src, n, s, Mode::SORTING, &meter);
                    run(src, &mut pile, sink, &mut report)?;
                }
            }
        }
        PileKind::Rebuilding => {
            if !src.exhausted(0) {
                let mut pile = RebuildingPile::new(src, s, &meter);
                run(src, &mut pile, sink, &mut report)?;
                let n = report.output_length;
                report.rebuilds = pile.rebuild_count();
                report.sbar = Geometry::new(n, s).sbar;
                report.below_regime = s < ceil_log2(n) as usize;
            }
        }
    }
    report.comparisons = c.comparisons() - cmp0;
    report.element_reads = c.reads() - reads0;
    report.liveness_tests = c.liveness_tests() - live0;
    report.peak_workspace_bits = meter.peak_total_bits();
    Ok(report)
}

fn run<S: KeySource, P: PriorityQueue>(
    src: &S,
    pile: &mut P,
    sink: &mut OutputSink<S::Key>,
    report: &mut SortReport,
) -> Result<()> {
    let mut i = 0;
    while !src.exhausted(i) {
        pile.insert(i)?;
        i += 1;
    }
    pile.settle();
    while let Some(j) = pile.minimum() {
        sink.emit(src.key(j));
        let before = src.counters().reads();
        pile.extract(j)?;
        report.max_extract_reads = report.max_extract_reads.max(src.counters().reads() - before);
    }
    report.output_length = sink.len();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ElementSource;

    #[test]
    fn empty_and_tiny_inputs() {
        for kind in PileKind::ALL {
            let src = ElementSource::new(Vec::<u64>::new());
            let mut sink = OutputSink::new();
            let r = pq_sort(&src, 4, &mut sink, kind).unwrap();
            assert_eq!(r.output_length, 0);
            let src = ElementSource::new(vec![3u64, 1, 2]);
            let mut sink = OutputSink::new();
            pq_sort(&src, 4, &mut sink, kind).unwrap();
            assert_eq!(sink.as_slice(), &[1, 2, 3]);
        }
    }

    #[test]
    fn stream_needs_rebuilding_pile() {
        let src = ElementSource::streaming(vec![2u64, 1]);
        let mut sink = OutputSink::new();
        assert_eq!(pq_sort(&src, 4, &mut sink, PileKind::Navigation), Err(Error::UnknownLength));
        pq_sort(&src, 4, &mut sink, PileKind::Rebuilding).unwrap();
        assert_eq!(sink.as_slice(), &[1, 2]);
    }

    #[test]
    fn pile_kind_round_trips() {
        for kind in PileKind::ALL {
            assert_eq!(kind.name().parse::<PileKind>(), Ok(kind));
        }
    }
}
