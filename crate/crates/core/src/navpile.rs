//! Adjustable navigation pile: the tournament tree squeezed into `Θ(S)` bits.
//!
//! Each node keeps one presence bit. A branch node of height `h` keeps
//! `min{2h, ⌈lg N⌉}` navigation bits: either the exact index of the minimum of
//! its covered range, or a relative bucket index and a quantile index (`h` bits
//! each), naming the quantile that holds that minimum. Updating a path scans
//! the active quantile of each sibling.
//!
//! The default [`Mode::SORTING`] is monotone and sequential and needs no
//! per-element state. Any other mode allocates one liveness bit per element.

use crate::bitvec::PackedBits;
use crate::error::{contract, Result};
use crate::layout::Geometry;
use crate::model::{above_watermark, precedes, Charge, KeySource, Keyed, WorkspaceMeter};

/// Element inspections of an incremental submersion performed per insert.
pub const INSPECTIONS_PER_INSERT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    /// Extractions remove the current minimum; insertions stay above the latest output.
    pub monotone: bool,
    /// Insertions visit the input from index 0 upwards.
    pub sequential: bool,
}

impl Mode {
    pub const SORTING: Mode = Mode { monotone: true, sequential: true };
    pub const RANDOM_ORDER: Mode = Mode { monotone: true, sequential: false };
    pub const GENERAL: Mode = Mode { monotone: false, sequential: false };

    fn needs_alive_bits(self) -> bool {
        !(self.monotone && self.sequential)
    }
}

/// Start and length of an active quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantileRef {
    pub start: usize,
    pub size: usize,
}

#[derive(Debug, Clone, Copy)]
struct SubmersionBuffer {
    bucket: usize,
    min: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Scan {
    pos: usize,
    end: usize,
}

/// Incremental submersion of the submersion buffer: next node to fix sits at `height`.
/// Scanned elements fold straight into `carried`, whose key is kept so the
/// per-element comparison costs no extra read.
#[derive(Debug, Clone, Copy)]
struct Job<K> {
    height: u32,
    carried: Option<Keyed<K>>,
    scan: Option<Scan>,
}

/// Scalar words besides the header: inserted, insertion-min, submersion bucket
/// and min, job height, carried key and index, scan position and end, tree-min,
/// overall-min, latest key and index, size.
const SCALAR_WORDS: u64 = 14;

pub struct NavigationPile<'a, S: KeySource> {
    src: &'a S,
    geo: Geometry,
    mode: Mode,
    presence: PackedBits,
    nav: PackedBits,
    header: Vec<usize>,
    alive: Option<PackedBits>,
    inserted: usize,
    insertion_min: Option<usize>,
    submersion: Option<SubmersionBuffer>,
    job: Option<Job<S::Key>>,
    tree_min: Option<usize>,
    overall_min: Option<usize>,
    latest: Option<Keyed<S::Key>>,
    size: usize,
    eager_finishes: usize,
    _charges: Vec<Charge>,
}

type K<S> = Keyed<<S as KeySource>::Key>;

impl<'a, S: KeySource> NavigationPile<'a, S> {
    pub fn new(src: &'a S, n: usize, s: usize, mode: Mode, meter: &WorkspaceMeter) -> Self {
        let geo = Geometry::new(n, s);
        let mut header = Vec::with_capacity(geo.levels as usize);
        let mut offset = 0;
        for h in 1..=geo.levels {
            header.push(offset);
            offset += geo.nodes_at(h) * geo.nav_width(h) as usize;
        }
        debug_assert_eq!(offset, geo.total_nav_bits());
        assert!(geo.levels == 0 || offset < 4 * geo.sbar, "navigation bits {offset} reach 4·S̄");
        let presence = PackedBits::new(2 * geo.sbar - 1);
        let nav = PackedBits::new(offset);
        let alive = mode.needs_alive_bits().then(|| PackedBits::new(n));
        let mut charges = vec![
            meter.charge_bits(presence.len() as u64),
            meter.charge_bits(nav.len() as u64),
            meter.charge_words(header.len() as u64 + SCALAR_WORDS),
        ];
        if let Some(a) = &alive {
            charges.push(meter.charge_bits(a.len() as u64));
        }
        Self {
            src,
            geo,
            mode,
            presence,
            nav,
            header,
            alive,
            inserted: 0,
            insertion_min: None,
            submersion: None,
            job: None,
            tree_min: None,
            overall_min: None,
            latest: None,
            size: 0,
            eager_finishes: 0,
            _charges: charges,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn sbar(&self) -> usize {
        self.geo.sbar
    }

    pub fn capacity(&self) -> usize {
        self.geo.n
    }

    pub fn bucket_size(&self) -> usize {
        self.geo.bucket
    }

    /// True when `S̄ < ⌈lg N⌉`, outside the range the cost bounds are stated for.
    pub fn below_regime(&self) -> bool {
        (self.geo.sbar as u32) < self.geo.index_bits
    }

    pub fn nav_bits(&self) -> usize {
        self.nav.len()
    }

    pub fn presence_bits(&self) -> usize {
        self.presence.len()
    }

    /// Bit offset of the first navigation field of each height `1..=lg S̄`.
    pub fn header(&self) -> &[usize] {
        &self.header
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

    pub fn is_quiescent(&self) -> bool {
        self.job.is_none()
    }

    pub fn eager_finishes(&self) -> usize {
        self.eager_finishes
    }

    /// Inserted so far in sequential mode.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    fn keyed(&self, i: usize) -> K<S> {
        Keyed::read(self.src, i)
    }

    fn better(&self, a: Option<K<S>>, b: Option<K<S>>) -> Option<K<S>> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(if precedes(self.src.counters(), &x, &y) { x } else { y }),
        }
    }

    /// Liveness of a key already read; monotone sequential mode only.
    fn above_latest(&self, i: usize, x: &K<S>) -> bool {
        i < self.inserted
            && match &self.latest {
                Some(l) => above_watermark(self.src.counters(), x, l),
                None => true,
            }
    }

    /// Minimum alive element in `[start, end)`.
    fn scan(&self, start: usize, end: usize) -> Option<K<S>> {
        let mut best = None;
        for i in start..end {
            if let Some(x) = self.inspect(i) {
                best = self.better(best, Some(x));
            }
        }
        best
    }

    /// Reads element `i` if it can be alive and returns it when it is.
    fn inspect(&self, i: usize) -> Option<K<S>> {
        match &self.alive {
            Some(bits) => bits.get(i).then(|| self.keyed(i)),
            None => {
                let x = self.keyed(i);
                self.above_latest(i, &x).then_some(x)
            }
        }
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.inspect(i).is_some()
    }

    fn present(&self, h: u32, v: usize) -> bool {
        self.presence.get(self.geo.slot(h, v))
    }

    fn nav_pos(&self, h: u32, v: usize) -> usize {
        self.header[h as usize - 1] + v * self.geo.nav_width(h) as usize
    }

    /// Active quantile of branch node `v` at height `h`, or `None` if its range is empty.
    pub fn calculate_quantile(&self, v: usize, h: u32) -> Option<QuantileRef> {
        assert!(h >= 1 && h <= self.geo.levels, "height {h} is not a branch height");
        if !self.present(h, v) {
            return None;
        }
        let width = self.geo.nav_width(h) as usize;
        let info = self.nav_pos(h, v);
        if self.geo.is_exact(h) {
            let start = self.nav.read_field(info, width) as usize;
            return Some(QuantileRef { start, size: 1 });
        }
        let h_bits = h as usize;
        let b = self.nav.read_field(info, h_bits) as usize;
        let q = self.nav.read_field(info + h_bits, h_bits) as usize;
        let qs = self.geo.quantile_size(h);
        let bucket_start = self.geo.covered_start(h, v) + b * self.geo.bucket;
        let start = bucket_start + q * qs;
        let past = (start + qs).min(bucket_start + self.geo.bucket).min(self.geo.n);
        Some(QuantileRef { start, size: past - start })
    }

    /// Raw navigation field of a branch node: `(bucket, quantile)` or `(index, 0)` when exact.
    pub fn node_fields(&self, v: usize, h: u32) -> (usize, usize) {
        let info = self.nav_pos(h, v);
        if self.geo.is_exact(h) {
            (self.nav.read_field(info, self.geo.index_bits as usize) as usize, 0)
        } else {
            let hb = h as usize;
            (self.nav.read_field(info, hb) as usize, self.nav.read_field(info + hb, hb) as usize)
        }
    }

    fn set_node(&mut self, h: u32, v: usize, min: Option<usize>) {
        let slot = self.geo.slot(h, v);
        self.presence.set(slot, min.is_some());
        let (Some(m), true) = (min, h >= 1) else { return };
        let info = self.nav_pos(h, v);
        if self.geo.is_exact(h) {
            self.nav.write_field(info, self.geo.index_bits as usize, m as u64);
            return;
        }
        let rel = m - self.geo.covered_start(h, v);
        let b = rel / self.geo.bucket;
        let q = (rel % self.geo.bucket) / self.geo.quantile_size(h);
        let hb = h as usize;
        self.nav.write_field(info, hb, b as u64);
        self.nav.write_field(info + hb, hb, q as u64);
    }

    /// Where the minimum of node `(h, v)` has to be searched.
    fn search_range(&self, h: u32, v: usize) -> Option<(usize, usize)> {
        if !self.present(h, v) {
            return None;
        }
        if h == 0 {
            return Some(self.geo.bucket_range(v));
        }
        self.calculate_quantile(v, h).map(|q| (q.start, q.start + q.size))
    }

    fn node_min(&self, h: u32, v: usize) -> Option<K<S>> {
        let (start, end) = self.search_range(h, v)?;
        self.scan(start, end)
    }

    /// Recomputes the updating path above bucket `u`, whose minimum is `bucket_min`.
    fn fix_path(&mut self, u: usize, bucket_min: Option<K<S>>) {
        self.set_node(0, u, bucket_min.map(|k| k.index));
        let mut carried = bucket_min;
        for h in 1..=self.geo.levels {
            let child = u >> (h - 1);
            let other = self.node_min(h - 1, child ^ 1);
            carried = self.better(carried, other);
            self.set_node(h, child >> 1, carried.map(|k| k.index));
        }
        self.tree_min = carried.map(|k| k.index);
    }

    fn refresh_overall(&mut self) {
        let mut best = None;
        let candidates = [self.tree_min, self.submersion.and_then(|s| s.min), self.insertion_min];
        for k in candidates.into_iter().flatten() {
            let x = self.keyed(k);
            best = self.better(best, Some(x));
        }
        self.overall_min = best.map(|k| k.index);
    }

    pub fn insert(&mut self, i: usize) -> Result<()> {
        if i >= self.geo.n {
            return contract(format!("insert of {i} beyond capacity {}", self.geo.n));
        }
        if self.mode.sequential {
            self.insert_sequential(i, false).map(|_| ())
        } else {
            self.insert_anywhere(i)
        }
    }

    fn check_insert_order(&self, x: &K<S>) -> Result<()> {
        if let (true, Some(l)) = (self.mode.monotone, &self.latest) {
            if !above_watermark(self.src.counters(), x, l) {
                return contract(format!("insert of {} is not above the latest output", x.index));
            }
        }
        Ok(())
    }

    /// Copies element `i` into a pile being rebuilt. Elements at or below the
    /// latest output only advance the cursor. Returns whether `i` was alive.
    pub(crate) fn transfer(&mut self, i: usize) -> Result<bool> {
        self.insert_sequential(i, true)
    }

    pub(crate) fn latest_output(&self) -> Option<usize> {
        self.latest.map(|l| l.index)
    }

    /// Records an output of an element this pile has not received yet.
    pub(crate) fn observe_output(&mut self, j: usize) {
        debug_assert!(self.mode == Mode::SORTING && j >= self.inserted);
        self.latest = Some(self.keyed(j));
    }

    fn insert_sequential(&mut self, i: usize, allow_dead: bool) -> Result<bool> {
        if i != self.inserted {
            return contract(format!("sequential insert expected index {}, got {i}", self.inserted));
        }
        let x = self.keyed(i);
        let dead = allow_dead && self.latest.is_some_and(|l| !above_watermark(self.src.counters(), &x, &l));
        if !dead {
            self.check_insert_order(&x)?;
            if let Some(bits) = &mut self.alive {
                bits.set(i, true);
            }
        }
        self.inserted += 1;
        if !dead {
            self.size += 1;
            let ins = self.insertion_min.map(|m| self.keyed(m));
            if ins.is_none() || precedes(self.src.counters(), &x, ins.as_ref().unwrap()) {
                self.insertion_min = Some(i);
            }
            let all = self.overall_min.map(|m| self.keyed(m));
            if all.is_none() || precedes(self.src.counters(), &x, all.as_ref().unwrap()) {
                self.overall_min = Some(i);
            }
        }
        if self.inserted.is_multiple_of(self.geo.bucket) || self.inserted == self.geo.n {
            if self.job.is_some() {
                self.eager_finishes += 1;
                self.settle();
            }
            self.submersion = Some(SubmersionBuffer { bucket: i / self.geo.bucket, min: self.insertion_min });
            self.insertion_min = None;
            self.job = Some(Job { height: 0, carried: None, scan: None });
        }
        self.work(INSPECTIONS_PER_INSERT);
        Ok(!dead)
    }

    /// Non-sequential insert: fixes the element's bucket and path at once.
    fn insert_anywhere(&mut self, i: usize) -> Result<()> {
        let x = self.keyed(i);
        self.check_insert_order(&x)?;
        let bits = self.alive.as_mut().expect("non-sequential modes carry liveness bits");
        if bits.get(i) {
            return contract(format!("element {i} is already in the pile"));
        }
        bits.set(i, true);
        self.size += 1;
        self.repair_bucket(i / self.geo.bucket);
        self.refresh_overall();
        Ok(())
    }

    fn repair_bucket(&mut self, u: usize) {
        let (start, end) = self.geo.bucket_range(u);
        let m = self.scan(start, end);
        self.fix_path(u, m);
    }

    /// Advances the pending submersion by up to `budget` element inspections.
    fn work(&mut self, mut budget: usize) {
        while budget > 0 {
            let Some(mut job) = self.job else { return };
            let sub = self.submersion.expect("job without a submersion buffer");
            let u = sub.bucket;
            if job.height == 0 {
                self.set_node(0, u, sub.min);
                job.carried = sub.min.map(|m| self.keyed(m));
                job.height = 1;
                budget -= 1;
            } else {
                let h = job.height;
                let child = u >> (h - 1);
                let mut scan = match job.scan {
                    Some(s) => s,
                    None => match self.search_range(h - 1, child ^ 1) {
                        Some((pos, end)) => Scan { pos, end },
                        None => Scan { pos: 0, end: 0 },
                    },
                };
                while budget > 0 && scan.pos < scan.end {
                    if let Some(x) = self.inspect(scan.pos) {
                        job.carried = self.better(job.carried, Some(x));
                    }
                    scan.pos += 1;
                    budget -= 1;
                }
                if scan.pos < scan.end {
                    job.scan = Some(scan);
                } else {
                    self.set_node(h, child >> 1, job.carried.map(|k| k.index));
                    job.height += 1;
                    job.scan = None;
                    budget = budget.saturating_sub(1);
                }
            }
            if job.height > self.geo.levels {
                self.tree_min = job.carried.map(|k| k.index);
                self.submersion = None;
                self.job = None;
            } else {
                self.job = Some(job);
            }
        }
    }

    /// Finishes any pending submersion.
    pub fn settle(&mut self) {
        while self.job.is_some() {
            self.work(usize::MAX);
        }
    }

    pub fn extract(&mut self, j: usize) -> Result<()> {
        if self.mode.monotone {
            if self.overall_min != Some(j) {
                return contract(format!("monotone extract of {j}, which is not the minimum"));
            }
        } else if !self.alive.as_ref().is_some_and(|b| j < b.len() && b.get(j)) {
            return contract(format!("extract of {j}, which is not in the pile"));
        }
        self.settle();
        if self.mode.monotone {
            self.latest = Some(self.keyed(j));
        }
        if let Some(bits) = &mut self.alive {
            bits.set(j, false);
        }
        self.size -= 1;
        let bs = self.geo.bucket;
        let u = j / bs;
        let filling = self.mode.sequential
            && !self.inserted.is_multiple_of(bs)
            && self.inserted < self.geo.n
            && u == self.inserted / bs;
        if filling {
            let start = u * bs;
            self.insertion_min = self.scan(start, self.inserted).map(|k| k.index);
        } else {
            self.repair_bucket(u);
        }
        self.refresh_overall();
        Ok(())
    }

    /// Takes over the state of `other`, a pile of the same shape over the same
    /// input. Copies workspace only; no element is read.
    pub fn copy_from(&mut self, other: &Self) -> Result<()> {
        if self.geo != other.geo || self.mode != other.mode || !std::ptr::eq(self.src, other.src) {
            return contract("copy between piles of different shape or input");
        }
        self.presence.clone_from(&other.presence);
        self.nav.clone_from(&other.nav);
        self.alive.clone_from(&other.alive);
        self.inserted = other.inserted;
        self.insertion_min = other.insertion_min;
        self.submersion = other.submersion;
        self.job = other.job;
        self.tree_min = other.tree_min;
        self.overall_min = other.overall_min;
        self.latest = other.latest;
        self.size = other.size;
        Ok(())
    }

    /// Drops every element below `e` from a fully inserted sorting pile in one
    /// sweep: about `2.5N` reads, however many elements go. The largest dropped
    /// element becomes the latest output.
    pub fn discard_below(&mut self, e: usize) -> Result<()> {
        if self.mode != Mode::SORTING || self.inserted < self.geo.n {
            return contract("bulk discard needs a fully inserted sorting pile");
        }
        self.settle();
        let bound = self.keyed(e);
        let mut dropped = None;
        let mut gone = 0;
        for u in 0..self.geo.nodes_at(0) {
            let (start, end) = self.geo.bucket_range(u);
            let mut best = None;
            for i in start..end {
                let Some(x) = self.inspect(i) else { continue };
                if precedes(self.src.counters(), &x, &bound) {
                    gone += 1;
                    dropped =
                        if dropped.is_some_and(|d| precedes(self.src.counters(), &x, &d)) { dropped } else { Some(x) };
                } else {
                    best = self.better(best, Some(x));
                }
            }
            self.set_node(0, u, best.map(|k| k.index));
        }
        if dropped.is_none() {
            return Ok(());
        }
        self.latest = dropped;
        self.size -= gone;
        for h in 1..=self.geo.levels {
            for v in 0..self.geo.nodes_at(h) {
                let m = self.node_min(h - 1, 2 * v);
                let m = self.better(m, self.node_min(h - 1, 2 * v + 1));
                self.set_node(h, v, m.map(|k| k.index));
            }
        }
        self.tree_min = self.node_min(self.geo.levels, 0).map(|k| k.index);
        self.refresh_overall();
        Ok(())
    }

    /// Brute-force check of the structure against its alive set.
    ///
    /// Only meaningful when quiescent. Reads go through the metered source.
    pub fn verify(&self) -> std::result::Result<(), String> {
        if !self.is_quiescent() {
            return Err("pending submersion".into());
        }
        let g = &self.geo;
        let in_tree_end = if self.mode.sequential {
            let bs = g.bucket;
            if self.inserted == g.n || self.inserted.is_multiple_of(bs) {
                self.inserted
            } else {
                self.inserted / bs * bs
            }
        } else {
            g.n
        };
        for h in 0..=g.levels {
            for v in 0..g.nodes_at(h) {
                let start = g.covered_start(h, v).min(in_tree_end);
                let end = (start.max(g.covered_start(h, v)) + (g.bucket << h)).min(in_tree_end);
                let truth = if start < end { self.scan(start, end) } else { None };
                let present = self.present(h, v);
                if present != truth.is_some() {
                    return Err(format!("presence of node ({h}, {v}) is {present}, truth {truth:?}"));
                }
                if let (Some(t), true) = (truth, h >= 1) {
                    let q = self.calculate_quantile(v, h).unwrap();
                    if !(q.start..q.start + q.size).contains(&t.index) {
                        return Err(format!("node ({h}, {v}) quantile {q:?} misses minimum {}", t.index));
                    }
                }
            }
        }
        let mut truth = self.scan(0, if self.mode.sequential { self.inserted } else { g.n });
        if truth.map(|t| t.index) != self.overall_min {
            truth = truth.take();
            return Err(format!("overall minimum {:?}, truth {:?}", self.overall_min, truth.map(|t| t.index)));
        }
        Ok(())
    }
}
