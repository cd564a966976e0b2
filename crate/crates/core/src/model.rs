//! Restricted RAM contract: read-only input, write-only output, metered workspace.

use std::cell::Cell;
use std::fmt::Debug;
use std::rc::Rc;
use std::sync::Arc;

/// Bits per machine word. Indices of any realistic input fit, so `w ≥ ⌈lg N⌉` holds.
pub const WORD_BITS: u64 = 64;

/// Instrumentation shared by everything that touches one input array.
#[derive(Debug, Default)]
pub struct Counters {
    reads: Cell<u64>,
    comparisons: Cell<u64>,
    liveness_tests: Cell<u64>,
}

impl Counters {
    pub fn reads(&self) -> u64 {
        self.reads.get()
    }

    /// Ordering comparisons between two input elements.
    pub fn comparisons(&self) -> u64 {
        self.comparisons.get()
    }

    /// Tests of one element against the latest-output watermark.
    pub fn liveness_tests(&self) -> u64 {
        self.liveness_tests.get()
    }

    pub(crate) fn count_read(&self) {
        self.reads.set(self.reads.get() + 1);
    }

    pub(crate) fn count_comparison(&self) {
        self.comparisons.set(self.comparisons.get() + 1);
    }

    pub(crate) fn count_liveness(&self) {
        self.liveness_tests.set(self.liveness_tests.get() + 1);
    }

    pub fn reset(&self) {
        self.reads.set(0);
        self.comparisons.set(0);
        self.liveness_tests.set(0);
    }
}

/// Metered random-access view of a read-only array.
///
/// A streaming source hides its length: callers probe with
/// [`exhausted`](Self::exhausted) instead.
#[derive(Debug)]
pub struct ElementSource<T> {
    data: Arc<[T]>,
    streaming: bool,
    counters: Counters,
}

impl<T: Copy> ElementSource<T> {
    pub fn new(data: impl Into<Arc<[T]>>) -> Self {
        Self { data: data.into(), streaming: false, counters: Counters::default() }
    }

    pub fn streaming(data: impl Into<Arc<[T]>>) -> Self {
        Self { data: data.into(), streaming: true, counters: Counters::default() }
    }

    /// Reads element `i`. Out-of-range reads are a fatal contract violation.
    #[inline]
    pub fn get(&self, i: usize) -> T {
        assert!(i < self.data.len(), "read of index {i} past the end of the input");
        self.counters.count_read();
        self.data[i]
    }

    /// `None` for streaming sources.
    pub fn len(&self) -> Option<usize> {
        (!self.streaming).then_some(self.data.len())
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn exhausted(&self, i: usize) -> bool {
        i >= self.data.len()
    }

    pub fn is_streaming(&self) -> bool {
        self.streaming
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }
}

/// A metered array of ordered keys. Piles only ever see their input through this.
pub trait KeySource {
    type Key: Ord + Copy + Debug;

    /// Metered read of the key at `i`.
    fn key(&self, i: usize) -> Self::Key;

    /// Known length, or `None` for a stream.
    fn len_hint(&self) -> Option<usize>;

    fn exhausted(&self, i: usize) -> bool;

    fn counters(&self) -> &Counters;
}

impl KeySource for ElementSource<u64> {
    type Key = u64;

    #[inline]
    fn key(&self, i: usize) -> u64 {
        self.get(i)
    }

    fn len_hint(&self) -> Option<usize> {
        self.len()
    }

    fn exhausted(&self, i: usize) -> bool {
        ElementSource::exhausted(self, i)
    }

    fn counters(&self) -> &Counters {
        &self.counters
    }
}

impl<S: KeySource + ?Sized> KeySource for &S {
    type Key = S::Key;

    fn key(&self, i: usize) -> S::Key {
        (**self).key(i)
    }

    fn len_hint(&self) -> Option<usize> {
        (**self).len_hint()
    }

    fn exhausted(&self, i: usize) -> bool {
        (**self).exhausted(i)
    }

    fn counters(&self) -> &Counters {
        (**self).counters()
    }
}

/// A key paired with its array index. The derived order is the total order used
/// everywhere: by key, ties broken by the smaller index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Keyed<K> {
    pub key: K,
    pub index: usize,
}

impl<K: Ord + Copy> Keyed<K> {
    pub fn read<S: KeySource<Key = K> + ?Sized>(src: &S, index: usize) -> Self {
        Keyed { key: src.key(index), index }
    }
}

/// Counted `a < b` under the key order.
#[inline]
pub(crate) fn precedes<K: Ord>(counters: &Counters, a: &Keyed<K>, b: &Keyed<K>) -> bool {
    counters.count_comparison();
    a < b
}

/// Counted `x > latest`.
#[inline]
pub(crate) fn above_watermark<K: Ord>(counters: &Counters, x: &Keyed<K>, latest: &Keyed<K>) -> bool {
    counters.count_liveness();
    x > latest
}

/// Sequential write-only output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutputSink<T> {
    emitted: Vec<T>,
}

impl<T> OutputSink<T> {
    pub fn new() -> Self {
        Self { emitted: Vec::new() }
    }

    pub fn emit(&mut self, value: T) {
        self.emitted.push(value);
    }

    pub fn len(&self) -> usize {
        self.emitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emitted.is_empty()
    }

    /// Inspection for tests and CLI writers; algorithms never read back.
    pub fn as_slice(&self) -> &[T] {
        &self.emitted
    }

    pub fn into_vec(self) -> Vec<T> {
        self.emitted
    }
}

fn bump(cell: &Cell<u64>, by: u64) -> u64 {
    let now = cell.get() + by;
    cell.set(now);
    now
}

fn raise(cell: &Cell<u64>, to: u64) {
    cell.set(cell.get().max(to));
}

#[derive(Debug, Default)]
struct MeterInner {
    payload_bits: Cell<u64>,
    payload_peak: Cell<u64>,
    words: Cell<u64>,
    words_peak: Cell<u64>,
    total_peak: Cell<u64>,
}

/// Accounting device for mutable workspace.
///
/// Bit-vector payloads are charged in bits; header offsets and scalar state are
/// charged in words of [`WORD_BITS`] bits. Clones share one ledger, so a single
/// meter can follow several structures at once.
#[derive(Debug, Clone, Default)]
pub struct WorkspaceMeter {
    inner: Rc<MeterInner>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChargeKind {
    Bits,
    Words,
}

/// Registered allocation; released when dropped.
#[derive(Debug)]
pub struct Charge {
    meter: WorkspaceMeter,
    amount: u64,
    kind: ChargeKind,
}

impl Charge {
    pub fn amount(&self) -> u64 {
        self.amount
    }
}

impl Drop for Charge {
    fn drop(&mut self) {
        match self.kind {
            ChargeKind::Bits => self.meter.release_bits(self.amount),
            ChargeKind::Words => self.meter.release_words(self.amount),
        }
    }
}

impl WorkspaceMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn word_bits(&self) -> u64 {
        WORD_BITS
    }

    pub fn charge_bits(&self, bits: u64) -> Charge {
        let now = bump(&self.inner.payload_bits, bits);
        raise(&self.inner.payload_peak, now);
        self.update_total();
        Charge { meter: self.clone(), amount: bits, kind: ChargeKind::Bits }
    }

    pub fn charge_words(&self, words: u64) -> Charge {
        let now = bump(&self.inner.words, words);
        raise(&self.inner.words_peak, now);
        self.update_total();
        Charge { meter: self.clone(), amount: words, kind: ChargeKind::Words }
    }

    fn release_bits(&self, bits: u64) {
        let prev = self.inner.payload_bits.get();
        assert!(prev >= bits, "workspace meter released more bits than were charged");
        self.inner.payload_bits.set(prev - bits);
    }

    fn release_words(&self, words: u64) {
        let prev = self.inner.words.get();
        assert!(prev >= words, "workspace meter released more words than were charged");
        self.inner.words.set(prev - words);
    }

    fn update_total(&self) {
        let total = self.inner.payload_bits.get() + WORD_BITS * self.inner.words.get();
        raise(&self.inner.total_peak, total);
    }

    /// Payload bits currently registered.
    pub fn bits(&self) -> u64 {
        self.inner.payload_bits.get()
    }

    pub fn peak_bits(&self) -> u64 {
        self.inner.payload_peak.get()
    }

    pub fn words(&self) -> u64 {
        self.inner.words.get()
    }

    pub fn peak_words(&self) -> u64 {
        self.inner.words_peak.get()
    }

    /// High-water mark of payload bits plus words expressed in bits.
    pub fn peak_total_bits(&self) -> u64 {
        self.inner.total_peak.get()
    }
}
