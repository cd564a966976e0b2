//! Bucket and tree geometry shared by the piles.

/// `⌈log2 x⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub(crate) fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Geometry {
    /// Capacity: number of array positions covered.
    pub n: usize,
    /// Number of buckets, a power of two.
    pub sbar: usize,
    /// `lg S̄`, the height of the root.
    pub levels: u32,
    /// `⌈N / S̄⌉`.
    pub bucket: usize,
    /// `⌈lg N⌉`, at least 1: width of an exact index.
    pub index_bits: u32,
}

impl Geometry {
    /// `S̄ = 2^⌈lg S⌉`, clamped to `2^⌈lg N⌉`.
    pub fn new(n: usize, s: usize) -> Self {
        assert!(n >= 1, "a pile needs capacity for at least one element");
        let s = s.max(1);
        let sbar = s.next_power_of_two().min(n.next_power_of_two());
        Self { n, sbar, levels: sbar.trailing_zeros(), bucket: n.div_ceil(sbar), index_bits: ceil_log2(n).max(1) }
    }

    /// Array range of bucket `u`, clamped to the capacity (possibly empty).
    pub fn bucket_range(&self, u: usize) -> (usize, usize) {
        let start = (u * self.bucket).min(self.n);
        (start, (start + self.bucket).min(self.n))
    }

    pub fn nodes_at(&self, h: u32) -> usize {
        self.sbar >> h
    }

    /// Breadth-first slot of node `v` at height `h`; the root is slot 0.
    pub fn slot(&self, h: u32, v: usize) -> usize {
        ((1usize << (self.levels - h)) - 1) + v
    }

    pub fn covered_start(&self, h: u32, v: usize) -> usize {
        v * (self.bucket << h)
    }

    /// `⌈N / (S̄·2^h)⌉`, the quantile size seen from height `h`.
    pub fn quantile_size(&self, h: u32) -> usize {
        self.n.div_ceil(self.sbar << h)
    }

    /// Navigation width `min{2h, ⌈lg N⌉}`.
    pub fn nav_width(&self, h: u32) -> u32 {
        (2 * h).min(self.index_bits)
    }

    /// Nodes whose width reaches `⌈lg N⌉` store the exact index.
    pub fn is_exact(&self, h: u32) -> bool {
        self.nav_width(h) == self.index_bits
    }

    pub fn total_nav_bits(&self) -> usize {
        (1..=self.levels).map(|h| self.nodes_at(h) * self.nav_width(h) as usize).sum()
    }
}
