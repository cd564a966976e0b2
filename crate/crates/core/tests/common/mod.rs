//! Full-memory reference implementations shared by the integration tests.
#![allow(dead_code)]

use adjpile::Point;
use num_bigint::BigInt;

/// Orientation sign with arbitrary-precision arithmetic.
pub fn orientation(p: Point, q: Point, r: Point) -> std::cmp::Ordering {
    let b = |v: i64| BigInt::from(v);
    let det = (b(q.x) - b(p.x)) * (b(r.y) - b(p.y)) - (b(q.y) - b(p.y)) * (b(r.x) - b(p.x));
    det.sign().cmp(&num_bigint::Sign::NoSign)
}

fn chain(points: &[Point], keep: std::cmp::Ordering) -> Vec<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|p| p.x);
    let mut hull: Vec<Point> = Vec::new();
    for &p in &sorted {
        while hull.len() >= 2 && orientation(hull[hull.len() - 2], hull[hull.len() - 1], p) != keep {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Upper hull vertices left to right, collinear middles dropped.
pub fn upper_hull(points: &[Point]) -> Vec<Point> {
    chain(points, std::cmp::Ordering::Less)
}

/// All hull vertices clockwise from the leftmost point.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut hull = upper_hull(points);
    let lower = chain(points, std::cmp::Ordering::Greater);
    if lower.len() > 2 {
        hull.extend(lower[1..lower.len() - 1].iter().rev());
    }
    hull
}

pub fn sorted<T: Ord + Clone>(data: &[T]) -> Vec<T> {
    let mut v = data.to_vec();
    v.sort();
    v
}

/// `⌈lg x⌉`, with `lg 1 = 0`.
pub fn ceil_lg(x: usize) -> u32 {
    usize::BITS - x.saturating_sub(1).leading_zeros()
}

/// Rounded workspace target for an input of `n` elements.
pub fn sbar(n: usize, s: usize) -> usize {
    s.max(1).next_power_of_two().min(n.max(1).next_power_of_two())
}
