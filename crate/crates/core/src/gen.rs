//! Seeded input generators for benchmarks, self-checks and tests.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use crate::hull::Point;

/// `n` distinct values drawn uniformly from `[0, 2^40)`.
pub fn distinct_values(n: usize, seed: u64) -> Vec<u64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = rng.gen_range(0..1u64 << 40);
        if seen.insert(v) {
            out.push(v);
        }
    }
    out
}

/// `n` values from `[0, max(1, n/4))`, so most values repeat.
pub fn values_with_duplicates(n: usize, seed: u64) -> Vec<u64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let range = (n as u64 / 4).max(1);
    (0..n).map(|_| rng.gen_range(0..range)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HullShape {
    /// Uniform in a disc of radius 2^20.
    Disc,
    /// `y = x²` over distinct `x` in `[1, 32767]`: only the two ends are upper-hull vertices.
    ParabolaUp,
    /// `y = −x²`: every point is an upper-hull vertex.
    ParabolaDown,
    /// Five Gaussian clusters with deviation 2^14.
    Clustered,
}

impl HullShape {
    pub const ALL: [HullShape; 4] =
        [HullShape::Disc, HullShape::ParabolaUp, HullShape::ParabolaDown, HullShape::Clustered];

    pub fn name(self) -> &'static str {
        match self {
            HullShape::Disc => "disc",
            HullShape::ParabolaUp => "parabola-up",
            HullShape::ParabolaDown => "parabola-down",
            HullShape::Clustered => "clustered",
        }
    }
}

impl fmt::Display for HullShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HullShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        HullShape::ALL.into_iter().find(|h| h.name() == s).ok_or_else(|| format!("unknown shape {s:?}"))
    }
}

const PARABOLA_MAX_X: i64 = 32767;

/// `n` points of the given shape with pairwise distinct `x` and pairwise distinct `y`.
pub fn points(shape: HullShape, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut xs = HashSet::with_capacity(n);
    let mut ys = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    if matches!(shape, HullShape::ParabolaUp | HullShape::ParabolaDown) {
        assert!(n as i64 <= PARABOLA_MAX_X, "parabola inputs hold at most {PARABOLA_MAX_X} points");
    }
    let r: i64 = 1 << 20;
    let centers: Vec<(f64, f64)> = (0..5).map(|_| (rng.gen_range(-r..r) as f64, rng.gen_range(-r..r) as f64)).collect();
    let spread = Normal::new(0.0, (1u32 << 14) as f64).expect("positive deviation");
    while out.len() < n {
        let p = match shape {
            HullShape::Disc => {
                let (x, y) = (rng.gen_range(-r..=r), rng.gen_range(-r..=r));
                if x * x + y * y > r * r {
                    continue;
                }
                Point::new(x, y)
            }
            HullShape::ParabolaUp | HullShape::ParabolaDown => {
                let x = rng.gen_range(1..=PARABOLA_MAX_X);
                let y = if shape == HullShape::ParabolaUp { x * x } else { -x * x };
                Point::new(x, y)
            }
            HullShape::Clustered => {
                let (cx, cy) = centers[rng.gen_range(0..centers.len())];
                let x = (cx + spread.sample(&mut rng)).round() as i64;
                let y = (cy + spread.sample(&mut rng)).round() as i64;
                Point::new(x.clamp(-(2 * r), 2 * r), y.clamp(-(2 * r), 2 * r))
            }
        };
        if xs.contains(&p.x) || ys.contains(&p.y) {
            continue;
        }
        xs.insert(p.x);
        ys.insert(p.y);
        out.push(p);
    }
    out
}
