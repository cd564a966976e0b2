//! Packed bit arrays with word-sized field access, and a rank/select index.
//!
//! Logical bit `i` lives in word `i / 64` at bit position `i % 64` counted from
//! the least significant end. Multi-bit fields read and write most-significant
//! bit first, so the first bit of a field is its top bit.

use std::cell::Cell;

const W: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackedBits {
    len: usize,
    words: Vec<u64>,
}

impl PackedBits {
    pub fn new(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(W)] }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut out = Self::new(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Payload words, `⌈len / 64⌉` of them.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % W);
        if bit {
            self.words[i / W] |= mask;
        } else {
            self.words[i / W] &= !mask;
        }
    }

    /// Bits `[pos, pos+len)` in storage order, bit `pos` in the lowest position.
    #[inline]
    fn raw(&self, pos: usize, len: usize) -> u64 {
        if len == 0 {
            return 0;
        }
        let (w, off) = (pos / W, pos % W);
        let mut v = self.words[w] >> off;
        if off + len > W {
            v |= self.words[w + 1] << (W - off);
        }
        if len < W {
            v &= (1u64 << len) - 1;
        }
        v
    }

    #[inline]
    fn write_raw(&mut self, pos: usize, len: usize, v: u64) {
        if len == 0 {
            return;
        }
        let (w, off) = (pos / W, pos % W);
        let mask = if len == W { u64::MAX } else { (1u64 << len) - 1 };
        self.words[w] = (self.words[w] & !(mask << off)) | ((v & mask) << off);
        if off + len > W {
            let spill = off + len - W;
            let hi_mask = (1u64 << spill) - 1;
            self.words[w + 1] = (self.words[w + 1] & !hi_mask) | ((v & mask) >> (W - off));
        }
    }

    /// Field of `len ≤ 64` bits at `pos`, first bit most significant.
    #[inline]
    pub fn read_field(&self, pos: usize, len: usize) -> u64 {
        assert!(len <= W, "field of {len} bits exceeds the word size");
        assert!(pos + len <= self.len, "field [{pos}, {}) out of range", pos + len);
        if len == 0 {
            return 0;
        }
        self.raw(pos, len).reverse_bits() >> (W - len)
    }

    #[inline]
    pub fn write_field(&mut self, pos: usize, len: usize, value: u64) {
        assert!(len <= W, "field of {len} bits exceeds the word size");
        assert!(pos + len <= self.len, "field [{pos}, {}) out of range", pos + len);
        if len == 0 {
            assert_eq!(value, 0, "non-zero value for an empty field");
            return;
        }
        assert!(len == W || value >> len == 0, "value {value} does not fit in {len} bits");
        self.write_raw(pos, len, value.reverse_bits() >> (W - len));
    }

    /// Number of one bits in `[start, end)`.
    pub fn ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len);
        let mut count = 0;
        let mut p = start;
        while p < end {
            let take = (end - p).min(W - p % W);
            count += self.raw(p, take).count_ones() as usize;
            p += take;
        }
        count
    }

    /// Position of the one bit with zero-based rank `r` inside `[start, end)`.
    pub fn nth_one_in(&self, start: usize, end: usize, mut r: usize) -> Option<usize> {
        assert!(start <= end && end <= self.len);
        let mut p = start;
        while p < end {
            let take = (end - p).min(W - p % W);
            let chunk = self.raw(p, take);
            let c = chunk.count_ones() as usize;
            if r < c {
                return Some(p + select_in_word(chunk, r));
            }
            r -= c;
            p += take;
        }
        None
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }
}

/// Position of the one bit with zero-based rank `r` in `word`.
#[inline]
fn select_in_word(mut word: u64, r: usize) -> usize {
    for _ in 0..r {
        word &= word - 1;
    }
    word.trailing_zeros() as usize
}

/// Aligned array of fixed-width unsigned fields; every access touches one word.
#[derive(Debug, Clone, Default)]
struct Fields {
    width: usize,
    len: usize,
    words: Vec<u64>,
}

impl Fields {
    fn new(width: usize) -> Self {
        debug_assert!(W.is_multiple_of(width));
        Self { width, len: 0, words: Vec::new() }
    }

    fn push(&mut self, v: u64) {
        debug_assert!(self.width == W || v >> self.width == 0);
        let bit = self.len * self.width;
        if bit / W == self.words.len() {
            self.words.push(0);
        }
        self.words[bit / W] |= v << (bit % W);
        self.len += 1;
    }

    #[inline]
    fn get(&self, i: usize) -> u64 {
        let bit = i * self.width;
        let v = self.words[bit / W] >> (bit % W);
        if self.width == W {
            v
        } else {
            v & ((1u64 << self.width) - 1)
        }
    }

    fn bits(&self) -> u64 {
        (self.len * self.width) as u64
    }
}

/// Groups of this many one (or zero) bits share one select sample.
const GROUP: usize = 64;
/// A group whose blocks span more than this is stored as an explicit position list.
const DENSE_SPAN: usize = 15;
/// Vectors of at most this many blocks are searched over block ranks directly.
const SMALL_BLOCKS: usize = 32;

#[derive(Debug, Clone, Default)]
struct SelectDirectory {
    /// Block holding the first bit of each group, then the block of the last target bit.
    /// Empty for small vectors.
    samples: Fields,
    /// Offset into `positions` for sparse groups (unused entries hold 0).
    sparse_offset: Fields,
    positions: Fields,
}

/// Constant-time rank and select over an immutable [`PackedBits`].
///
/// Absolute ranks are kept per 64-bit block after the first. Select samples
/// the block of every 64th target bit; a group that spans at most 16 blocks is
/// resolved by a short binary search over block ranks, a wider group keeps its
/// positions explicitly. Vectors of up to 32 blocks skip the samples and search
/// all blocks. Every query touches at most 8 words, which
/// [`word_reads`](Self::word_reads) lets callers verify.
#[derive(Debug)]
pub struct RankSelect {
    bits: PackedBits,
    ones: usize,
    block_rank: Fields,
    sel1: SelectDirectory,
    sel0: SelectDirectory,
    word_reads: Cell<u64>,
}

impl RankSelect {
    pub fn new(bits: PackedBits) -> Self {
        let nb = bits.len();
        let width = if nb < 1 << 15 {
            16
        } else if nb < 1 << 31 {
            32
        } else {
            64
        };
        let nblocks = bits.words.len();
        let mut block_rank = Fields::new(width);
        let mut acc = 0usize;
        for (b, w) in bits.words.iter().enumerate() {
            if b > 0 {
                block_rank.push(acc as u64);
            }
            acc += w.count_ones() as usize;
        }
        let ones = acc;
        let sel1 = Self::directory(&bits, width, nblocks, true);
        let sel0 = Self::directory(&bits, width, nblocks, false);
        Self { bits, ones, block_rank, sel1, sel0, word_reads: Cell::new(0) }
    }

    fn directory(bits: &PackedBits, width: usize, nblocks: usize, target: bool) -> SelectDirectory {
        let nb = bits.len();
        let mut group_starts = Vec::new();
        let mut seen = 0usize;
        let mut all_positions = Vec::new();
        for (b, &w) in bits.words.iter().enumerate() {
            let valid = if (b + 1) * W <= nb { u64::MAX } else { (1u64 << (nb - b * W)) - 1 };
            let mut word = if target { w } else { !w & valid };
            while word != 0 {
                let p = b * W + word.trailing_zeros() as usize;
                if seen.is_multiple_of(GROUP) {
                    group_starts.push(b);
                }
                all_positions.push(p);
                seen += 1;
                word &= word - 1;
            }
        }
        let mut dir = SelectDirectory {
            samples: Fields::new(width),
            sparse_offset: Fields::new(width),
            positions: Fields::new(width),
        };
        if nblocks <= SMALL_BLOCKS || all_positions.is_empty() {
            return dir;
        }
        let last_block = all_positions[all_positions.len() - 1] / W;
        for (k, &b0) in group_starts.iter().enumerate() {
            dir.samples.push(b0 as u64);
            let b1 = group_starts.get(k + 1).copied().unwrap_or(last_block);
            if b1 - b0 > DENSE_SPAN {
                dir.sparse_offset.push(dir.positions.len as u64);
                let end = ((k + 1) * GROUP).min(all_positions.len());
                for &p in &all_positions[k * GROUP..end] {
                    dir.positions.push(p as u64);
                }
            } else {
                dir.sparse_offset.push(0);
            }
        }
        dir.samples.push(last_block as u64);
        dir
    }

    pub fn bits(&self) -> &PackedBits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.bits.len() - self.ones
    }

    /// Bits used by the index on top of the payload.
    pub fn index_bits(&self) -> u64 {
        let d = |s: &SelectDirectory| s.samples.bits() + s.sparse_offset.bits() + s.positions.bits();
        self.block_rank.bits() + d(&self.sel1) + d(&self.sel0)
    }

    pub fn word_reads(&self) -> u64 {
        self.word_reads.get()
    }

    pub fn reset_word_reads(&self) {
        self.word_reads.set(0);
    }

    #[inline]
    fn touch(&self) {
        self.word_reads.set(self.word_reads.get() + 1);
    }

    #[inline]
    fn data_word(&self, b: usize) -> u64 {
        self.touch();
        self.bits.words[b]
    }

    #[inline]
    fn rank_before_block(&self, b: usize) -> usize {
        if b == 0 {
            return 0;
        }
        self.touch();
        self.block_rank.get(b - 1) as usize
    }

    pub fn access(&self, i: usize) -> bool {
        assert!(i < self.len(), "access({i}) out of range");
        (self.data_word(i / W) >> (i % W)) & 1 == 1
    }

    /// Ones among bits `0..=i`.
    pub fn rank(&self, i: usize) -> usize {
        assert!(i < self.len(), "rank({i}) out of range");
        let b = i / W;
        let off = i % W;
        let mask = if off == W - 1 { u64::MAX } else { (1u64 << (off + 1)) - 1 };
        self.rank_before_block(b) + (self.data_word(b) & mask).count_ones() as usize
    }

    /// Zeros among bits `0..=i`.
    pub fn rank0(&self, i: usize) -> usize {
        i + 1 - self.rank(i)
    }

    /// Index of the `j`-th one bit, `j` counted from 1.
    pub fn select(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.ones {
            return None;
        }
        Some(self.select_with(&self.sel1, j, true))
    }

    /// Index of the `j`-th zero bit, `j` counted from 1.
    pub fn select0(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.count_zeros() {
            return None;
        }
        Some(self.select_with(&self.sel0, j, false))
    }

    fn select_with(&self, dir: &SelectDirectory, j: usize, target: bool) -> usize {
        let before = |b: usize| {
            let r = self.rank_before_block(b);
            if target {
                r
            } else {
                b * W - r
            }
        };
        let k = (j - 1) / GROUP;
        let (b0, b1) = if dir.samples.len == 0 {
            (0, self.bits.words.len() - 1)
        } else {
            self.touch();
            self.touch();
            (dir.samples.get(k) as usize, dir.samples.get(k + 1) as usize)
        };
        if dir.samples.len > 0 && b1 - b0 > DENSE_SPAN {
            self.touch();
            let off = dir.sparse_offset.get(k) as usize;
            self.touch();
            return dir.positions.get(off + (j - 1) % GROUP) as usize;
        }
        // Largest block in [b0, b1] with fewer than j targets before it.
        let (mut lo, mut hi) = (b0, b1);
        let mut lo_before = None;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            let r = before(mid);
            if r < j {
                lo = mid;
                lo_before = Some(r);
            } else {
                hi = mid - 1;
            }
        }
        let r = lo_before.unwrap_or_else(|| before(lo));
        let mut word = self.data_word(lo);
        if !target {
            word = !word;
        }
        lo * W + select_in_word(word, j - r - 1)
    }
}
