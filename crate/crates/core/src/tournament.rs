//! Adjustable tournament tree: one index word per node over `S̄` buckets.
//!
//! Insertions are sequential and buffered; a full buffer is submerged into the
//! tree a couple of node updates per insert. Extractions are monotone and
//! rescan one bucket plus one root path.

use crate::error::{contract, Result};
use crate::layout::Geometry;
use crate::model::{above_watermark, precedes, Charge, KeySource, Keyed, WorkspaceMeter};

/// Node updates of an incremental submersion performed per insert.
pub const SUBMERSION_STEPS_PER_INSERT: usize = 2;

#[derive(Debug, Clone, Copy)]
struct SubmersionBuffer {
    bucket: usize,
    min: Option<usize>,
}

/// Progress of an incremental submersion: the next node to compute is at
/// `height`, above child `child` at `height - 1` (height 0 sets the leaf).
#[derive(Debug, Clone, Copy)]
struct Cursor {
    height: u32,
    child: usize,
}

pub struct TournamentTree<'a, S: KeySource> {
    src: &'a S,
    geo: Geometry,
    none: usize,
    slots: Vec<usize>,
    header: Vec<usize>,
    inserted: usize,
    insertion_min: Option<usize>,
    submersion: Option<SubmersionBuffer>,
    cursor: Option<Cursor>,
    overall_min: Option<usize>,
    latest: Option<Keyed<S::Key>>,
    size: usize,
    eager_finishes: usize,
    _charges: [Charge; 2],
}

/// Scalar words besides the header: inserted, insertion-min, submersion bucket
/// and min, cursor height and child, overall-min, latest key and index, size.
const SCALAR_WORDS: u64 = 10;

impl<'a, S: KeySource> TournamentTree<'a, S> {
    pub fn new(src: &'a S, n: usize, s: usize, meter: &WorkspaceMeter) -> Self {
        let geo = Geometry::new(n, s);
        let slot_count = 2 * geo.sbar - 1;
        let header: Vec<usize> = (0..=geo.levels).map(|l| (1usize << l) - 1).collect();
        let charges = [
            meter.charge_bits(slot_count as u64 * meter.word_bits()),
            meter.charge_words(header.len() as u64 + SCALAR_WORDS),
        ];
        Self {
            src,
            geo,
            none: n,
            slots: vec![n; slot_count],
            header,
            inserted: 0,
            insertion_min: None,
            submersion: None,
            cursor: None,
            overall_min: None,
            latest: None,
            size: 0,
            eager_finishes: 0,
            _charges: charges,
        }
    }

    pub fn sbar(&self) -> usize {
        self.geo.sbar
    }

    pub fn bucket_size(&self) -> usize {
        self.geo.bucket
    }

    pub fn capacity(&self) -> usize {
        self.geo.n
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn minimum(&self) -> Option<usize> {
        self.overall_min
    }

    /// Node contents in breadth-first order, `None` standing for the empty range.
    pub fn slots(&self) -> Vec<Option<usize>> {
        self.slots.iter().map(|&t| (t != self.none).then_some(t)).collect()
    }

    pub fn is_quiescent(&self) -> bool {
        self.cursor.is_none()
    }

    /// Submersions that had to be finished at once because the next buffer filled first.
    pub fn eager_finishes(&self) -> usize {
        self.eager_finishes
    }

    fn slot_at(&self, level: u32, v: usize) -> usize {
        self.header[level as usize] + v
    }

    fn get(&self, slot: usize) -> Option<usize> {
        let t = self.slots[slot];
        (t != self.none).then_some(t)
    }

    fn put(&mut self, slot: usize, v: Option<usize>) {
        self.slots[slot] = v.unwrap_or(self.none);
    }

    fn keyed(&self, i: usize) -> Keyed<S::Key> {
        Keyed::read(self.src, i)
    }

    fn smaller(&self, a: Option<Keyed<S::Key>>, b: Option<Keyed<S::Key>>) -> Option<Keyed<S::Key>> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(if precedes(self.src.counters(), &x, &y) { x } else { y }),
        }
    }

    pub fn insert(&mut self, i: usize) -> Result<()> {
        if i != self.inserted {
            return contract(format!("sequential insert expected index {}, got {i}", self.inserted));
        }
        if i >= self.geo.n {
            return contract(format!("insert of {i} beyond capacity {}", self.geo.n));
        }
        let x = self.keyed(i);
        if let Some(latest) = self.latest {
            if !above_watermark(self.src.counters(), &x, &latest) {
                return contract(format!("insert of {i} is not above the latest output"));
            }
        }
        self.inserted += 1;
        self.size += 1;
        let ins = self.insertion_min.map(|m| self.keyed(m));
        if ins.is_none() || precedes(self.src.counters(), &x, ins.as_ref().unwrap()) {
            self.insertion_min = Some(i);
        }
        let all = self.overall_min.map(|m| self.keyed(m));
        if all.is_none() || precedes(self.src.counters(), &x, all.as_ref().unwrap()) {
            self.overall_min = Some(i);
        }
        if self.inserted.is_multiple_of(self.geo.bucket) || self.inserted == self.geo.n {
            if self.cursor.is_some() {
                self.eager_finishes += 1;
                self.settle();
            }
            self.submersion = Some(SubmersionBuffer { bucket: i / self.geo.bucket, min: self.insertion_min });
            self.insertion_min = None;
            self.cursor = Some(Cursor { height: 0, child: i / self.geo.bucket });
        }
        for _ in 0..SUBMERSION_STEPS_PER_INSERT {
            if !self.step() {
                break;
            }
        }
        Ok(())
    }

    /// One node update of the pending submersion; false if none is pending.
    fn step(&mut self) -> bool {
        let Some(cur) = self.cursor else { return false };
        let sub = self.submersion.expect("cursor without a submersion buffer");
        let levels = self.geo.levels;
        if cur.height == 0 {
            let leaf = self.slot_at(levels, sub.bucket);
            self.put(leaf, sub.min);
        } else {
            let level = levels - cur.height + 1;
            let this = self.slot_at(level, cur.child);
            let sibling = if cur.child % 2 == 0 { this + 1 } else { this - 1 };
            let above = self.slot_at(level - 1, cur.child / 2);
            let a = self.get(this).map(|t| self.keyed(t));
            let b = self.get(sibling).map(|t| self.keyed(t));
            let winner = self.smaller(a, b).map(|k| k.index);
            self.put(above, winner);
        }
        let next = Cursor { height: cur.height + 1, child: if cur.height == 0 { cur.child } else { cur.child / 2 } };
        if next.height > levels {
            self.cursor = None;
            self.submersion = None;
        } else {
            self.cursor = Some(next);
        }
        true
    }

    /// Finishes any pending submersion.
    pub fn settle(&mut self) {
        while self.step() {}
    }

    /// Sets the leaf of bucket `bucket` and recomputes its whole path to the root.
    pub fn submerge_at_once(&mut self, bucket: usize, bucket_min: Option<usize>) {
        let min = bucket_min.map(|m| self.keyed(m));
        self.submerge_keyed(bucket, min);
    }

    fn submerge_keyed(&mut self, bucket: usize, bucket_min: Option<Keyed<S::Key>>) {
        let levels = self.geo.levels;
        let mut current = bucket;
        let leaf = self.slot_at(levels, current);
        self.put(leaf, bucket_min.map(|k| k.index));
        let mut carried = bucket_min;
        for level in (1..=levels).rev() {
            let this = self.slot_at(level, current);
            let sibling = if current.is_multiple_of(2) { this + 1 } else { this - 1 };
            let above = self.slot_at(level - 1, current / 2);
            let other = self.get(sibling).map(|t| self.keyed(t));
            carried = self.smaller(carried, other);
            self.put(above, carried.map(|k| k.index));
            current /= 2;
        }
    }

    pub fn extract(&mut self, j: usize) -> Result<()> {
        if self.overall_min != Some(j) {
            return contract(format!("monotone extract of {j}, which is not the minimum"));
        }
        let latest = self.keyed(j);
        self.latest = Some(latest);
        self.size -= 1;
        let bs = self.geo.bucket;
        let bucket = j / bs;
        let filling = !self.inserted.is_multiple_of(bs) && self.inserted < self.geo.n && bucket == self.inserted / bs;
        let (start, mut end) = self.geo.bucket_range(bucket);
        if filling {
            end = self.inserted;
        }
        let mut bucket_min: Option<Keyed<S::Key>> = None;
        for i in start..end {
            let x = self.keyed(i);
            if above_watermark(self.src.counters(), &x, &latest)
                && (bucket_min.is_none() || precedes(self.src.counters(), &x, bucket_min.as_ref().unwrap()))
            {
                bucket_min = Some(x);
            }
        }
        if filling {
            self.insertion_min = bucket_min.map(|k| k.index);
        } else if self.submersion.is_some_and(|s| s.bucket == bucket) {
            self.submerge_keyed(bucket, bucket_min);
            self.submersion = None;
            self.cursor = None;
        } else {
            self.submerge_keyed(bucket, bucket_min);
        }
        let mut best = self.get(0).map(|t| self.keyed(t));
        for k in [self.submersion.and_then(|s| s.min), self.insertion_min].into_iter().flatten() {
            let x = self.keyed(k);
            best = self.smaller(best, Some(x));
        }
        self.overall_min = best.map(|k| k.index);
        Ok(())
    }
}
