//! Augmented navigation pile: a filtered, non-monotone pile over at most `S` candidates.
//!
//! Candidates are the elements whose key passes the [`Filter`]. They get
//! ordinals `0..c` in array order, and two `S`-bit vectors indexed by ordinal
//! hold liveness (`alive`) and first-candidate flags (`start`). A unary count
//! vector with rank/select support maps a bucket to the ordinal range of its
//! candidates.
//!
//! A branch node of height `h` stores, besides the relative bucket and
//! quantile, the subpart of its bucket's `start` range that holds the flag of
//! the earliest candidate of its active quantile, and how many flags precede it
//! inside that subpart. That pins the ordinal of the quantile's first candidate
//! without scanning the bucket, so a quantile scan knows which `alive` bits to
//! consult.
//!
//! Quantiles of height `h` have `2^⌈lg ⌈N/S̄⌉⌉ / 2^h` elements (at least one),
//! so quantiles of a higher node nest inside those of a lower one.

use std::cell::Cell;
use std::ops::Bound;

use crate::bitvec::{PackedBits, RankSelect};
use crate::error::{contract, Error, Result};
use crate::layout::{ceil_log2, Geometry};
use crate::model::{Charge, KeySource, Keyed, WorkspaceMeter};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Min,
    Max,
}

/// Key window selecting the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Filter<K> {
    pub lo: Bound<K>,
    pub hi: Bound<K>,
}

impl<K: Ord + Copy> Filter<K> {
    /// Keys strictly between `lo` and `hi`.
    pub fn between(lo: K, hi: K) -> Self {
        Self { lo: Bound::Excluded(lo), hi: Bound::Excluded(hi) }
    }

    pub fn inclusive(lo: K, hi: K) -> Self {
        Self { lo: Bound::Included(lo), hi: Bound::Included(hi) }
    }

    pub fn everything() -> Self {
        Self { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn contains(&self, k: &K) -> bool {
        let lo = match &self.lo {
            Bound::Included(l) => k >= l,
            Bound::Excluded(l) => k > l,
            Bound::Unbounded => true,
        };
        let hi = match &self.hi {
            Bound::Included(h) => k <= h,
            Bound::Excluded(h) => k < h,
            Bound::Unbounded => true,
        };
        lo && hi
    }
}

#[derive(Debug, Clone, Copy)]
struct Cand<K> {
    key: Keyed<K>,
    /// Unknown only for elements taken from exact nodes.
    ord: Option<usize>,
}

/// Top, cached second, size, candidate count, capacity and filter window; the
/// header and two per-height lists add `3·lg S̄`, quantile bookkeeping three more.
const SCALAR_WORDS: u64 = 5;

pub struct AugmentedPile<'a, S: KeySource> {
    src: &'a S,
    geo: Geometry,
    orientation: Orientation,
    filter: Filter<S::Key>,
    capacity: usize,
    candidates: usize,
    count: RankSelect,
    alive: PackedBits,
    start: PackedBits,
    presence: PackedBits,
    nav: PackedBits,
    header: Vec<usize>,
    grid: usize,
    top: Option<usize>,
    size: usize,
    second: Cell<Option<Option<usize>>>,
    clear_list: Vec<Option<usize>>,
    first_list: Vec<Option<usize>>,
    _charges: Vec<Charge>,
}

impl<'a, S: KeySource> AugmentedPile<'a, S> {
    /// Counts the candidates of every bucket in one pass over the `n` elements.
    pub fn build(
        src: &'a S,
        n: usize,
        s: usize,
        filter: Filter<S::Key>,
        orientation: Orientation,
        meter: &WorkspaceMeter,
    ) -> Result<Self> {
        let geo = Geometry::new(n, s);
        let capacity = s.clamp(1, n);
        let scratch_len = capacity + geo.sbar - 1;
        let mut scratch = PackedBits::new(scratch_len);
        let scratch_charge = meter.charge_bits(scratch_len as u64);
        let mut pos = 0;
        let mut found = 0;
        for u in 0..geo.sbar {
            if u > 0 {
                pos += 1;
            }
            let (lo, hi) = geo.bucket_range(u);
            for i in lo..hi {
                if filter.contains(&src.key(i)) {
                    found += 1;
                    if found > capacity {
                        return Err(Error::TooManyCandidates { found, capacity });
                    }
                    scratch.set(pos, true);
                    pos += 1;
                }
            }
        }
        let count = RankSelect::new(PackedBits::from_bits((0..pos).map(|i| scratch.get(i))));
        drop(scratch);
        drop(scratch_charge);
        Ok(Self::assemble(src, geo, filter, orientation, capacity, found, count, meter))
    }

    /// An empty pile around a finished count vector.
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        src: &'a S,
        geo: Geometry,
        filter: Filter<S::Key>,
        orientation: Orientation,
        capacity: usize,
        found: usize,
        count: RankSelect,
        meter: &WorkspaceMeter,
    ) -> Self {
        let mut header = Vec::with_capacity(geo.levels as usize);
        let mut offset = 0;
        for h in 1..=geo.levels {
            header.push(offset);
            offset += geo.nodes_at(h) * Self::field_width(&geo, h);
        }
        let presence = PackedBits::new(2 * geo.sbar - 1);
        let nav = PackedBits::new(offset);
        let alive = PackedBits::new(capacity);
        let start = PackedBits::new(capacity);
        let levels = geo.levels as usize;
        let charges = vec![
            meter.charge_bits(presence.len() as u64),
            meter.charge_bits(nav.len() as u64),
            meter.charge_bits(alive.len() as u64),
            meter.charge_bits(start.len() as u64),
            meter.charge_bits(count.len() as u64),
            meter.charge_bits(count.index_bits()),
            meter.charge_words(3 * levels as u64 + SCALAR_WORDS + if levels > 0 { 3 } else { 0 }),
        ];
        Self {
            src,
            grid: geo.bucket.next_power_of_two(),
            geo,
            orientation,
            filter,
            capacity,
            candidates: found,
            count,
            alive,
            start,
            presence,
            nav,
            header,
            top: None,
            size: 0,
            second: Cell::new(Some(None)),
            clear_list: vec![None; levels],
            first_list: vec![None; levels],
            _charges: charges,
        }
    }

    /// A pile over the same candidates and alive set, ordered the other way.
    ///
    /// One bottom-up pass reads every element once, where draining this pile
    /// into a new one would cost a bucket scan per element moved.
    pub fn reoriented(&self, orientation: Orientation, meter: &WorkspaceMeter) -> Self {
        let count = RankSelect::new(self.count.bits().clone());
        let mut pile =
            Self::assemble(self.src, self.geo, self.filter, orientation, self.capacity, self.candidates, count, meter);
        pile.alive = self.alive.clone();
        pile.size = self.size;
        pile.second.set(None);
        // Subtrees still waiting for their right sibling, as (height, best).
        let _pending = meter.charge_words(2 * (self.geo.levels as u64 + 1));
        let mut pending: Vec<(u32, Option<Cand<S::Key>>)> = Vec::with_capacity(self.geo.levels as usize + 1);
        for u in 0..pile.geo.sbar {
            let mut best = pile.scan_bucket(u, None);
            let (mut h, mut v) = (0, u);
            pile.presence.set(pile.geo.slot(0, u), best.is_some());
            while pending.last().is_some_and(|&(ph, _)| ph == h) {
                let (_, left) = pending.pop().unwrap();
                best = pile.better(left, best);
                (h, v) = (h + 1, v >> 1);
                pile.write_completed(h, v, best);
            }
            pending.push((h, best));
        }
        pile.top = pending.pop().and_then(|(_, c)| c).map(|c| c.key.index);
        pile
    }

    /// Writes node `(v, h)` whose subtree is final. Start flags of other nodes
    /// that precede this node's flag all belong to its descendants.
    fn write_completed(&mut self, h: u32, v: usize, best: Option<Cand<S::Key>>) {
        self.presence.set(self.geo.slot(h, v), best.is_some());
        let Some(c) = best else { return };
        let (b, q) = self.write_nav(h, v, c.key.index);
        if self.geo.is_exact(h) {
            return;
        }
        let ord = c.ord.expect("bucket scans carry ordinals");
        let (lo, _) = self.quantile_of(v, h, b, q);
        let k = ord - self.candidates_in(lo, c.key.index);
        self.start.set(k, true);
        self.write_start_ref(h, v, k);
    }

    /// Stores where node `(v, h)` finds its start flag `k`.
    fn write_start_ref(&mut self, h: u32, v: usize, k: usize) {
        let (b, ..) = self.node_fields(v, h);
        let owner = (v << h) + b;
        let first = self.bucket_first(owner);
        let part = self.bucket_candidates(owner).div_ceil(1 << h).max(1);
        let sub = (k - first) / part;
        let before = self.start.ones_in(first + sub * part, k);
        assert!(before < h as usize, "before count {before} at height {h}");
        let pos = self.field_pos(h, v);
        let hb = h as usize;
        self.nav.write_field(pos + 2 * hb, hb, sub as u64);
        self.nav.write_field(pos + 3 * hb, ceil_log2(hb) as usize, before as u64);
    }

    fn field_width(geo: &Geometry, h: u32) -> usize {
        (geo.nav_width(h) + h + ceil_log2(h as usize)) as usize
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn filter(&self) -> &Filter<S::Key> {
        &self.filter
    }

    pub fn sbar(&self) -> usize {
        self.geo.sbar
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn nav_bits(&self) -> usize {
        self.nav.len()
    }

    pub fn count_vector(&self) -> &RankSelect {
        &self.count
    }

    pub fn start_bits(&self) -> &PackedBits {
        &self.start
    }

    pub fn alive_bits(&self) -> &PackedBits {
        &self.alive
    }

    /// Ordinal of the first candidate of bucket `u`; `u = S̄` gives the candidate count.
    pub fn bucket_first(&self, u: usize) -> usize {
        if u == 0 {
            0
        } else if u >= self.geo.sbar {
            self.candidates
        } else {
            self.count.select0(u).expect("count vector has S̄ − 1 zeros") + 1 - u
        }
    }

    /// Number of candidates in bucket `u`.
    pub fn bucket_candidates(&self, u: usize) -> usize {
        self.bucket_first(u + 1) - self.bucket_first(u)
    }

    fn read_candidate(&self, i: usize) -> Option<Keyed<S::Key>> {
        let x = Keyed::read(self.src, i);
        self.filter.contains(&x.key).then_some(x)
    }

    /// Ordinal of candidate `i` among all candidates, in array order.
    pub fn candidate_index(&self, i: usize) -> Result<usize> {
        if i >= self.geo.n || self.read_candidate(i).is_none() {
            return Err(Error::NotCandidate(i));
        }
        let u = i / self.geo.bucket;
        let (lo, _) = self.geo.bucket_range(u);
        let before = (lo..i).filter(|&t| self.read_candidate(t).is_some()).count();
        Ok(self.bucket_first(u) + before)
    }

    fn candidates_in(&self, lo: usize, hi: usize) -> usize {
        (lo..hi).filter(|&t| self.read_candidate(t).is_some()).count()
    }

    fn better(&self, a: Option<Cand<S::Key>>, b: Option<Cand<S::Key>>) -> Option<Cand<S::Key>> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => {
                self.src.counters().count_comparison();
                let x_wins = match self.orientation {
                    Orientation::Min => x.key < y.key,
                    Orientation::Max => x.key > y.key,
                };
                Some(if x_wins { x } else { y })
            }
        }
    }

    /// Best alive candidate in `[lo, hi)`, whose first candidate has ordinal `ord0`.
    /// The scan stops once `alive` alive candidates have been seen.
    fn scan(&self, lo: usize, hi: usize, ord0: usize, skip: Option<usize>, mut alive: usize) -> Option<Cand<S::Key>> {
        let mut ord = ord0;
        let mut best = None;
        for i in lo..hi {
            if alive == 0 {
                break;
            }
            if let Some(x) = self.read_candidate(i) {
                if self.alive.get(ord) {
                    alive -= 1;
                    if Some(i) != skip {
                        best = self.better(best, Some(Cand { key: x, ord: Some(ord) }));
                    }
                }
                ord += 1;
            }
        }
        best
    }

    fn alive_in_bucket(&self, u: usize) -> usize {
        self.alive.ones_in(self.bucket_first(u), self.bucket_first(u + 1))
    }

    fn scan_bucket(&self, u: usize, skip: Option<usize>) -> Option<Cand<S::Key>> {
        let (lo, hi) = self.geo.bucket_range(u);
        self.scan(lo, hi, self.bucket_first(u), skip, self.alive_in_bucket(u))
    }

    fn present(&self, h: u32, v: usize) -> bool {
        self.presence.get(self.geo.slot(h, v))
    }

    fn field_pos(&self, h: u32, v: usize) -> usize {
        self.header[h as usize - 1] + v * Self::field_width(&self.geo, h)
    }

    fn quantile_size(&self, h: u32) -> usize {
        (self.grid >> h).max(1)
    }

    /// Stored `(bucket, quantile, subpart, before)`; exact nodes give `(index, 0, 0, 0)`.
    pub fn node_fields(&self, v: usize, h: u32) -> (usize, usize, usize, usize) {
        let pos = self.field_pos(h, v);
        let hb = h as usize;
        let before_bits = ceil_log2(hb) as usize;
        if self.geo.is_exact(h) {
            let w = self.geo.index_bits as usize;
            return (self.nav.read_field(pos, w) as usize, 0, 0, 0);
        }
        let b = self.nav.read_field(pos, hb) as usize;
        let q = self.nav.read_field(pos + hb, hb) as usize;
        let sub = self.nav.read_field(pos + 2 * hb, hb) as usize;
        let before = self.nav.read_field(pos + 3 * hb, before_bits) as usize;
        (b, q, sub, before)
    }

    fn quantile_of(&self, v: usize, h: u32, b: usize, q: usize) -> (usize, usize) {
        let bucket_start = self.geo.covered_start(h, v) + b * self.geo.bucket;
        let qs = self.quantile_size(h);
        let lo = bucket_start + q * qs;
        (lo, (lo + qs).min(bucket_start + self.geo.bucket).min(self.geo.n))
    }

    /// Active quantile of a present, non-exact branch node.
    pub fn active_quantile(&self, v: usize, h: u32) -> Option<(usize, usize)> {
        if !self.present(h, v) || self.geo.is_exact(h) {
            return None;
        }
        let (b, q, _, _) = self.node_fields(v, h);
        Some(self.quantile_of(v, h, b, q))
    }

    fn subpart(&self, u: usize, h: u32, sub: usize) -> (usize, usize) {
        let first = self.bucket_first(u);
        let size = self.bucket_candidates(u);
        let part = size.div_ceil(1 << h).max(1);
        let lo = (first + sub * part).min(first + size);
        (lo, (lo + part).min(first + size))
    }

    /// Ordinal of the first candidate of the active quantile of node `(v, h)`.
    pub fn locate_first_candidate(&self, v: usize, h: u32) -> Result<usize> {
        if h == 0 || h > self.geo.levels || !self.present(h, v) {
            return contract(format!("node ({h}, {v}) has no active quantile"));
        }
        if self.geo.is_exact(h) {
            return contract(format!("node ({h}, {v}) stores an exact index"));
        }
        let (b, _, sub, before) = self.node_fields(v, h);
        let u = (v << h) + b;
        let (lo, hi) = self.subpart(u, h, sub);
        match self.start.nth_one_in(lo, hi, before) {
            Some(k) => Ok(k),
            None => contract(format!("start flags of node ({h}, {v}) are inconsistent")),
        }
    }

    fn node_best(&self, h: u32, v: usize, skip: Option<usize>) -> Option<Cand<S::Key>> {
        if !self.present(h, v) {
            return None;
        }
        if h == 0 {
            return self.scan_bucket(v, skip);
        }
        if self.geo.is_exact(h) {
            let (m, ..) = self.node_fields(v, h);
            return (Some(m) != skip).then(|| Cand { key: Keyed::read(self.src, m), ord: None });
        }
        let (lo, hi) = self.active_quantile(v, h).unwrap();
        let ord0 = self.locate_first_candidate(v, h).expect("present node locates its first candidate");
        self.scan(lo, hi, ord0, skip, usize::MAX)
    }

    pub fn insert(&mut self, i: usize) -> Result<()> {
        self.toggle(i, true)
    }

    pub fn extract(&mut self, j: usize) -> Result<()> {
        self.toggle(j, false)
    }

    fn toggle(&mut self, i: usize, becomes_alive: bool) -> Result<()> {
        if i >= self.geo.n {
            return Err(Error::NotCandidate(i));
        }
        let u = i / self.geo.bucket;
        let (lo, hi) = self.geo.bucket_range(u);
        let first = self.bucket_first(u);
        let beats_all = becomes_alive
            && self.read_candidate(i).is_some_and(|x| {
                self.top.is_none_or(|t| {
                    let mine = Some(Cand { key: x, ord: None });
                    let top = Some(Cand { key: Keyed::read(self.src, t), ord: None });
                    self.better(mine, top).is_some_and(|c| c.key.index == i)
                })
            });
        let (k, best) = if beats_all {
            // Only i's ordinal matters. Each height's first candidate is counted on the way.
            let mut ord = first;
            let mut h = 1;
            for t in lo..=i {
                while h <= self.geo.levels && lo + (i - lo) / self.quantile_size(h) * self.quantile_size(h) <= t {
                    if !self.geo.is_exact(h) {
                        self.first_list[h as usize - 1] = Some(ord);
                    }
                    h += 1;
                }
                if t < i && self.read_candidate(t).is_some() {
                    ord += 1;
                }
            }
            let key = Keyed::read(self.src, i);
            (ord, Some(Cand { key, ord: Some(ord) }))
        } else {
            // Scan the bucket as it will be after the toggle, locating i's ordinal on the way.
            let mut ord = first;
            let mut own = None;
            let mut best = None;
            let mut unseen = self.alive_in_bucket(u);
            for t in lo..hi {
                if own.is_some() && unseen == 0 {
                    break;
                }
                if let Some(x) = self.read_candidate(t) {
                    let was_alive = self.alive.get(ord);
                    unseen -= was_alive as usize;
                    let alive = if t == i {
                        own = Some(ord);
                        becomes_alive
                    } else {
                        was_alive
                    };
                    if alive {
                        best = self.better(best, Some(Cand { key: x, ord: Some(ord) }));
                    }
                    ord += 1;
                }
            }
            let Some(k) = own else { return Err(Error::NotCandidate(i)) };
            (k, best)
        };
        if self.alive.get(k) == becomes_alive {
            let state = if becomes_alive { "already" } else { "not" };
            return contract(format!("element {i} is {state} in the pile"));
        }
        self.release_old_firsts(u);
        self.alive.set(k, becomes_alive);
        if becomes_alive {
            self.size += 1;
        } else {
            self.size -= 1;
        }
        self.rebuild_path(u, best, beats_all);
        Ok(())
    }

    /// Clears the start flags owned by the path above bucket `u`, keeping those
    /// still owned by a node hanging off the path.
    fn release_old_firsts(&mut self, u: usize) {
        for h in 1..=self.geo.levels {
            let v = u >> h;
            self.clear_list[h as usize - 1] = None;
            if self.geo.is_exact(h) || !self.present(h, v) {
                continue;
            }
            let k = self.locate_first_candidate(v, h).expect("present node locates its first candidate");
            let (b, ..) = self.node_fields(v, h);
            let owner = (v << h) + b;
            let shared = owner != u && {
                let branch = usize::BITS - (owner ^ u).leading_zeros();
                let hs = branch - 1;
                hs >= 1
                    && !self.geo.is_exact(hs)
                    && self.present(hs, owner >> hs)
                    && self.locate_first_candidate(owner >> hs, hs).ok() == Some(k)
            };
            if !shared {
                self.clear_list[h as usize - 1] = Some(k);
            }
        }
        for k in self.clear_list.iter().flatten() {
            self.start.set(*k, false);
        }
    }

    fn write_nav(&mut self, h: u32, v: usize, m: usize) -> (usize, usize) {
        let pos = self.field_pos(h, v);
        if self.geo.is_exact(h) {
            let w = Self::field_width(&self.geo, h);
            self.nav.write_field(pos, w.min(64), 0);
            self.nav.write_field(pos, self.geo.index_bits as usize, m as u64);
            return (0, 0);
        }
        let rel = m - self.geo.covered_start(h, v);
        let b = rel / self.geo.bucket;
        let q = (rel % self.geo.bucket) / self.quantile_size(h);
        let hb = h as usize;
        self.nav.write_field(pos, hb, b as u64);
        self.nav.write_field(pos + hb, hb, q as u64);
        (b, q)
    }

    /// Recomputes the path above bucket `u`. With `beats_all`, the bucket's best
    /// is known to beat every other alive candidate, so siblings need no scan.
    fn rebuild_path(&mut self, u: usize, bucket_best: Option<Cand<S::Key>>, beats_all: bool) {
        self.presence.set(self.geo.slot(0, u), bucket_best.is_some());
        let mut carried = bucket_best;
        // (element, quantile start, candidates from there up to the element)
        let mut earlier_cache: Option<(usize, usize, usize)> = None;
        for h in 1..=self.geo.levels {
            let child = u >> (h - 1);
            if !beats_all {
                let other = self.node_best(h - 1, child ^ 1, None);
                carried = self.better(carried, other);
            }
            let v = child >> 1;
            self.presence.set(self.geo.slot(h, v), carried.is_some());
            if !beats_all {
                self.first_list[h as usize - 1] = None;
            }
            let Some(c) = carried else { continue };
            let (b, q) = self.write_nav(h, v, c.key.index);
            if !beats_all && !self.geo.is_exact(h) {
                let m = c.key.index;
                let ord = c.ord.expect("minima below exact heights carry their ordinal");
                let (lo, _) = self.quantile_of(v, h, b, q);
                let earlier = match earlier_cache {
                    Some((e, start, n)) if e == m && start <= lo => n - self.candidates_in(start, lo),
                    _ => self.candidates_in(lo, m),
                };
                earlier_cache = Some((m, lo, earlier));
                self.first_list[h as usize - 1] = Some(ord - earlier);
            }
        }
        for k in self.first_list.iter().flatten() {
            self.start.set(*k, true);
        }
        for h in 1..=self.geo.levels {
            if let Some(k) = self.first_list[h as usize - 1] {
                self.write_start_ref(h, u >> h, k);
            }
        }
        self.top = carried.map(|c| c.key.index);
        self.second.set(None);
    }

    /// Best alive candidate.
    pub fn top(&self) -> Option<usize> {
        self.top
    }

    /// Best alive candidate under [`Orientation::Max`].
    pub fn maximum(&self) -> Option<usize> {
        debug_assert_eq!(self.orientation, Orientation::Max);
        self.top
    }

    /// Second-best alive candidate, computed on demand and cached until the next update.
    pub fn next_to_top(&self) -> Option<usize> {
        if let Some(cached) = self.second.get() {
            return cached;
        }
        let result = self.top.and_then(|t| {
            let u = t / self.geo.bucket;
            let mut best = self.node_best(0, u, Some(t));
            for h in 1..=self.geo.levels {
                let sibling = (u >> (h - 1)) ^ 1;
                best = self.better(best, self.node_best(h - 1, sibling, None));
            }
            best.map(|c| c.key.index)
        });
        self.second.set(Some(result));
        result
    }

    pub fn next_to_maximum(&self) -> Option<usize> {
        debug_assert_eq!(self.orientation, Orientation::Max);
        self.next_to_top()
    }

    /// From-scratch check of presence, quantiles, start flags, subparts and before counts.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let g = &self.geo;
        let mut ords = vec![None; g.n];
        let mut c = 0;
        for (i, slot) in ords.iter_mut().enumerate() {
            if self.filter.contains(&Keyed::read(self.src, i).key) {
                *slot = Some(c);
                c += 1;
            }
        }
        if c != self.candidates {
            return Err(format!("candidate count {} differs from {}", self.candidates, c));
        }
        for u in 0..g.sbar {
            let (lo, hi) = g.bucket_range(u);
            let direct = ords[lo..hi].iter().flatten().count();
            if direct != self.bucket_candidates(u) {
                return Err(format!(
                    "bucket {u} holds {direct} candidates, count vector says {}",
                    self.bucket_candidates(u)
                ));
            }
        }
        let alive_at = |i: usize| ords[i].is_some_and(|k| self.alive.get(k));
        let key = |i: usize| Keyed::read(self.src, i);
        let pick = |range: std::ops::Range<usize>| {
            let it = range.filter(|&i| alive_at(i));
            match self.orientation {
                Orientation::Min => it.min_by_key(|&i| key(i)),
                Orientation::Max => it.max_by_key(|&i| key(i)),
            }
        };
        let mut expected_start = vec![false; self.capacity];
        for h in 0..=g.levels {
            for v in 0..g.nodes_at(h) {
                let lo = g.covered_start(h, v).min(g.n);
                let hi = (lo + (g.bucket << h)).min(g.n);
                let truth = pick(lo..hi);
                if self.present(h, v) != truth.is_some() {
                    return Err(format!("presence of node ({h}, {v}) disagrees with best {truth:?}"));
                }
                let (Some(m), true) = (truth, h >= 1) else { continue };
                if g.is_exact(h) {
                    let (idx, ..) = self.node_fields(v, h);
                    if idx != m {
                        return Err(format!("exact node ({h}, {v}) holds {idx}, best is {m}"));
                    }
                    continue;
                }
                let (qlo, qhi) = self.active_quantile(v, h).unwrap();
                if !(qlo..qhi).contains(&m) {
                    return Err(format!("node ({h}, {v}) quantile {qlo}..{qhi} misses best {m}"));
                }
                let first = (qlo..qhi).find_map(|i| ords[i]).unwrap();
                expected_start[first] = true;
                let (_, _, _, before) = self.node_fields(v, h);
                if before >= h as usize {
                    return Err(format!("node ({h}, {v}) before count {before} exceeds {}", h - 1));
                }
            }
        }
        for (k, &want) in expected_start.iter().enumerate() {
            if self.start.get(k) != want {
                return Err(format!("start flag {k} is {}, expected {want}", self.start.get(k)));
            }
        }
        for h in 1..=g.levels {
            for v in 0..g.nodes_at(h) {
                let Some((qlo, qhi)) = self.active_quantile(v, h) else { continue };
                let first = (qlo..qhi).find_map(|i| ords[i]).unwrap();
                match self.locate_first_candidate(v, h) {
                    Ok(k) if k == first => {}
                    other => return Err(format!("node ({h}, {v}) locates {other:?}, first candidate is {first}")),
                }
            }
        }
        let truth = pick(0..g.n);
        if truth != self.top {
            return Err(format!("top {:?}, best {truth:?}", self.top));
        }
        let second = truth.and_then(|t| {
            let it = (0..g.n).filter(|&i| i != t && alive_at(i));
            match self.orientation {
                Orientation::Min => it.min_by_key(|&i| key(i)),
                Orientation::Max => it.max_by_key(|&i| key(i)),
            }
        });
        if second != self.next_to_top() {
            return Err(format!("next to top {:?}, expected {second:?}", self.next_to_top()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ElementSource;

    fn values(n: usize) -> Vec<u64> {
        (0..n).map(|i| ((i * 29 + 7) % n) as u64).collect()
    }

    #[test]
    fn empty_window_has_only_separators() {
        let src = ElementSource::new(values(64));
        let m = WorkspaceMeter::new();
        let p = AugmentedPile::build(&src, 64, 8, Filter::between(10, 10), Orientation::Max, &m).unwrap();
        assert_eq!(p.count_vector().len(), 7);
        assert_eq!(p.count_vector().count_ones(), 0);
        assert_eq!(p.top(), None);
    }

    #[test]
    fn too_many_candidates_is_an_error() {
        let src = ElementSource::new(values(64));
        let m = WorkspaceMeter::new();
        let r = AugmentedPile::build(&src, 64, 8, Filter::between(0, 20), Orientation::Max, &m);
        assert!(matches!(r, Err(Error::TooManyCandidates { capacity: 8, .. })));
        assert_eq!(m.bits(), 0);
    }

    #[test]
    fn insert_extract_tracks_top_and_second() {
        let data = values(64);
        let src = ElementSource::new(data.clone());
        let m = WorkspaceMeter::new();
        let mut p = AugmentedPile::build(&src, 64, 8, Filter::between(20, 29), Orientation::Max, &m).unwrap();
        assert_eq!(p.candidates(), 8);
        let cands: Vec<usize> = (0..64).filter(|&i| data[i] > 20 && data[i] < 29).collect();
        for (k, &i) in cands.iter().enumerate() {
            assert_eq!(p.candidate_index(i).unwrap(), k);
        }
        assert!(p.insert(0).is_err() || data[0] > 20 && data[0] < 29);
        for &i in &cands {
            p.insert(i).unwrap();
            p.verify().unwrap();
        }
        let mut drained = vec![];
        while let Some(t) = p.maximum() {
            let second = p.next_to_maximum();
            p.extract(t).unwrap();
            p.verify().unwrap();
            assert_eq!(p.maximum(), second);
            drained.push(data[t]);
        }
        assert_eq!(drained, vec![28, 27, 26, 25, 24, 23, 22, 21]);
    }

    #[test]
    fn min_orientation_drains_ascending() {
        let data = values(100);
        let src = ElementSource::new(data.clone());
        let m = WorkspaceMeter::new();
        let mut p = AugmentedPile::build(&src, 100, 16, Filter::inclusive(40, 55), Orientation::Min, &m).unwrap();
        for i in (0..100).rev().filter(|&i| (40..=55).contains(&data[i])) {
            p.insert(i).unwrap();
        }
        p.verify().unwrap();
        let mut out = vec![];
        while let Some(t) = p.top() {
            p.extract(t).unwrap();
            out.push(data[t]);
        }
        assert_eq!(out, (40..=55).collect::<Vec<u64>>());
    }

    #[test]
    fn reoriented_pile_matches_its_source() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(11);
        let mut built = 0;
        for _ in 0..200 {
            let n = rng.gen_range(1..300);
            let s = rng.gen_range(1..40);
            let data: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1000)).collect();
            let src = ElementSource::new(data.clone());
            let m = WorkspaceMeter::new();
            let mut sorted = data.clone();
            sorted.sort();
            let lo = sorted[rng.gen_range(0..n)];
            let hi = sorted.iter().copied().filter(|&x| x >= lo).nth(s.min(n) - 1).unwrap_or(lo);
            let filter = Filter::inclusive(lo, hi);
            let Ok(mut p) = AugmentedPile::build(&src, n, s, filter, Orientation::Max, &m) else { continue };
            built += 1;
            let mut kept: Vec<usize> = vec![];
            for i in (0..n).filter(|&i| filter.contains(&data[i])) {
                if rng.gen_bool(0.7) {
                    p.insert(i).unwrap();
                    kept.push(i);
                }
            }
            let mut q = p.reoriented(Orientation::Min, &m);
            q.verify().unwrap();
            assert_eq!(q.len(), kept.len());
            kept.sort_by_key(|&i| (data[i], i));
            let mut drained = vec![];
            while let Some(t) = q.top() {
                q.extract(t).unwrap();
                drained.push(t);
            }
            assert_eq!(drained, kept);
        }
        assert!(built > 150, "only {built} windows fit");
    }
}
