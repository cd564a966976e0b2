//! Shared input builders for the benchmarks.

use adjpile::gen::{distinct_values, points, HullShape};
use adjpile::{ElementSource, PointSource};

pub const SEED: u64 = 0x5eed;

/// Distinct random values with a known length.
pub fn values(n: usize) -> ElementSource<u64> {
    ElementSource::new(distinct_values(n, SEED))
}

/// The same values presented as a stream of unknown length.
pub fn value_stream(n: usize) -> ElementSource<u64> {
    ElementSource::streaming(distinct_values(n, SEED))
}

pub fn point_set(shape: HullShape, n: usize) -> PointSource {
    PointSource::new(points(shape, n, SEED)).expect("generated points are in range")
}
