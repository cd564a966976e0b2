//! Memory-adjustable priority queues over a read-only array.
//!
//! The crate works in a restricted RAM setting: the input is a read-only
//! random-access array, the output is a write-only stream, and every piece of
//! mutable state is registered with a [`WorkspaceMeter`] so its size in bits
//! can be checked against the workspace target `S`.
//!
//! Structures:
//!
//! - [`TournamentTree`]: `2S̄ − 1` index words over `S̄` buckets.
//! - [`NavigationPile`]: the same operations in `Θ(S)` bits, using presence bits
//!   and quantile-thinned navigation fields.
//! - [`RebuildingPile`]: a navigation pile for inputs of unknown length.
//! - [`AugmentedPile`]: a filtered, non-monotone pile over at most `S`
//!   candidates, used by the hull algorithm.
//!
//! Applications live in [`sort`] and [`hull`].

pub mod augpile;
pub mod bitvec;
pub mod check;
pub mod error;
pub mod gen;
pub mod hull;
pub mod model;
pub mod navpile;
pub mod rebuild;
pub mod sort;
pub mod tournament;

mod layout;

pub use augpile::{AugmentedPile, Filter, Orientation};
pub use bitvec::{PackedBits, RankSelect};
pub use error::{Error, Result};
pub use hull::{Point, PointSource};
pub use model::{Counters, ElementSource, KeySource, OutputSink, WorkspaceMeter, WORD_BITS};
pub use navpile::{Mode, NavigationPile, QuantileRef};
pub use rebuild::RebuildingPile;
pub use sort::{pq_sort, PileKind, PriorityQueue, SortReport};
pub use tournament::TournamentTree;
