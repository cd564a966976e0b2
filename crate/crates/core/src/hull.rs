//! Upper and full convex hulls of a read-only point array.
//!
//! [`upper_hull`] runs in rounds over vertical slabs of at most `S` points.
//! Two navigation piles keyed by `x` feed the slab's points in order, and an
//! augmented max-pile restricted to the slab acts as the Graham-scan stack.
//! A pass over the points right of the slab finds the hull edge leaving it, and
//! its right endpoint starts the next round. [`chan_chen_upper_hull`] is the
//! index-based baseline with `Θ(s)` words.

use std::sync::Arc;

use crate::augpile::{AugmentedPile, Filter, Orientation};
use crate::error::{Error, Result};
use crate::layout::Geometry;
use crate::model::{Counters, KeySource, OutputSink, WorkspaceMeter};
use crate::navpile::{Mode, NavigationPile};

/// Coordinates must stay below this in magnitude, so every cross product fits an `i64`.
pub const COORD_LIMIT: i64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// `(q − p) × (r − p)`.
pub fn cross(p: Point, q: Point, r: Point) -> i64 {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

/// Going from `p` through `q` to `r` bends clockwise. Collinear is not a right turn.
pub fn right_turn(p: Point, q: Point, r: Point) -> bool {
    cross(p, q, r) < 0
}

/// Metered read-only point array.
#[derive(Debug)]
pub struct PointSource {
    points: Arc<[Point]>,
    counters: Counters,
}

impl PointSource {
    /// Rejects coordinates whose cross products could overflow.
    pub fn new(points: impl Into<Arc<[Point]>>) -> Result<Self> {
        let points = points.into();
        if let Some(i) = points.iter().position(|p| p.x.abs() >= COORD_LIMIT || p.y.abs() >= COORD_LIMIT) {
            return Err(Error::CoordinateRange(i));
        }
        Ok(Self { points, counters: Counters::default() })
    }

    pub fn get(&self, i: usize) -> Point {
        assert!(i < self.points.len(), "read of point {i} past the end of the input");
        self.counters.count_read();
        self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }
}

/// Checks that no two points share an `x` or a `y` coordinate.
///
/// Uses `O(N)` words, outside the workspace model; meant for validating inputs.
pub fn check_distinct(points: &[Point]) -> Result<()> {
    for axis in [|p: &Point| p.x, |p: &Point| p.y] {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| axis(&points[i]));
        for w in order.windows(2) {
            if axis(&points[w[0]]) == axis(&points[w[1]]) {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicateCoordinate { first, second });
            }
        }
    }
    Ok(())
}

trait View {
    fn point(&self, i: usize) -> Point;
    fn n(&self) -> usize;
    fn counters(&self) -> &Counters;
}

struct Upright<'a>(&'a PointSource);

/// The input turned by 180°: its upper hull is the lower hull of the input.
struct Rotated<'a>(&'a PointSource);

impl View for Upright<'_> {
    fn point(&self, i: usize) -> Point {
        self.0.get(i)
    }
    fn n(&self) -> usize {
        self.0.len()
    }
    fn counters(&self) -> &Counters {
        self.0.counters()
    }
}

impl View for Rotated<'_> {
    fn point(&self, i: usize) -> Point {
        let p = self.0.get(i);
        Point::new(-p.x, -p.y)
    }
    fn n(&self) -> usize {
        self.0.len()
    }
    fn counters(&self) -> &Counters {
        self.0.counters()
    }
}

/// Points keyed by `x`.
struct ByX<'v, V>(&'v V);

impl<V: View> KeySource for ByX<'_, V> {
    type Key = i64;

    fn key(&self, i: usize) -> i64 {
        self.0.point(i).x
    }

    fn len_hint(&self) -> Option<usize> {
        Some(self.0.n())
    }

    fn exhausted(&self, i: usize) -> bool {
        i >= self.0.n()
    }

    fn counters(&self) -> &Counters {
        self.0.counters()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HullReport {
    pub point_reads: u64,
    pub comparisons: u64,
    pub rounds: usize,
    pub output_length: usize,
    pub peak_workspace_bits: u64,
    pub sbar: usize,
}

/// Emits the upper hull, left to right, using piles of workspace target `s`.
pub fn upper_hull(src: &PointSource, s: usize, sink: &mut OutputSink<Point>) -> Result<HullReport> {
    measured(src, s, sink, |meter, sink| rounds(&Upright(src), s, meter, &mut |p| sink.emit(p)))
}

/// Emits the whole hull clockwise, starting at the leftmost point.
pub fn convex_hull(src: &PointSource, s: usize, sink: &mut OutputSink<Point>) -> Result<HullReport> {
    measured(src, s, sink, |meter, sink| {
        let mut upper = rounds(&Upright(src), s, meter, &mut |p| sink.emit(p))?;
        if src.len() < 2 {
            return Ok(upper);
        }
        // The lower chain runs from the rightmost point back to the leftmost; both are already out.
        let mut pending: Option<Point> = None;
        let mut seen_first = false;
        let lower = rounds(&Rotated(src), s, meter, &mut |p| {
            let p = Point::new(-p.x, -p.y);
            if !seen_first {
                seen_first = true;
            } else if let Some(q) = pending.replace(p) {
                sink.emit(q);
            }
        })?;
        upper.rounds += lower.rounds;
        Ok(upper)
    })
}

/// Index-based baseline keeping up to `2s` point indices.
pub fn chan_chen_upper_hull(src: &PointSource, s: usize, sink: &mut OutputSink<Point>) -> Result<HullReport> {
    if s < 2 {
        return Err(Error::Contract(format!("index budget {s} is below 2")));
    }
    measured(src, s, sink, |meter, sink| Ok(chan_chen(&Upright(src), s, meter, &mut |p| sink.emit(p))))
}

fn measured(
    src: &PointSource,
    s: usize,
    sink: &mut OutputSink<Point>,
    body: impl FnOnce(&WorkspaceMeter, &mut OutputSink<Point>) -> Result<HullReport>,
) -> Result<HullReport> {
    let c = src.counters();
    let (reads0, cmp0) = (c.reads(), c.comparisons());
    let before = sink.len();
    let meter = WorkspaceMeter::new();
    let mut report = body(&meter, sink)?;
    report.point_reads = c.reads() - reads0;
    report.comparisons = c.comparisons() - cmp0;
    report.output_length = sink.len() - before;
    report.peak_workspace_bits = meter.peak_total_bits();
    report.sbar = if src.is_empty() { 0 } else { Geometry::new(src.len(), s).sbar };
    Ok(report)
}

fn rounds<V: View>(view: &V, s: usize, meter: &WorkspaceMeter, emit: &mut dyn FnMut(Point)) -> Result<HullReport> {
    let n = view.n();
    let mut report = HullReport::default();
    if n == 0 {
        return Ok(report);
    }
    let s = s.max(1);
    let keys = ByX(view);
    let _state = meter.charge_words(6);
    let mut pile1 = NavigationPile::new(&keys, n, s, Mode::SORTING, meter);
    let mut pile2 = NavigationPile::new(&keys, n, s, Mode::SORTING, meter);
    for i in 0..n {
        pile1.insert(i)?;
        pile2.insert(i)?;
    }
    pile1.settle();
    pile2.settle();
    let mut i0 = pile1.minimum();
    while let Some(first) = i0 {
        report.rounds += 1;
        // Slab: the next s points by x, starting at the known hull vertex.
        let mut last = first;
        let mut taken = 0;
        while taken < s {
            let Some(j) = pile1.minimum() else { break };
            pile1.extract(j)?;
            last = j;
            taken += 1;
        }
        let (f1, f2) = (view.point(first).x, view.point(last).x);
        let slab = Filter::inclusive(f1, f2);
        let mut stack = AugmentedPile::build(&keys, n, s, slab, Orientation::Max, meter)?;

        // Graham scan over the slab, with the max-pile as the stack.
        let mut cache = TopTwo::default();
        for _ in 0..taken {
            let j = pile2.minimum().expect("second pile holds the slab");
            pile2.extract(j)?;
            let p = view.point(j);
            pop_while_not_right(view, &mut stack, &mut cache, p)?;
            stack.insert(j)?;
            cache = TopTwo { top: Some(p), below: cache.top };
        }

        // The hull edge leaving the slab through its right wall.
        let mut exit: Option<(usize, Point)> = None;
        for j in 0..n {
            let p = view.point(j);
            if p.x <= f2 {
                continue;
            }
            if let (Some((_, e)), Some(t)) = (exit, cache.top) {
                if right_turn(t, e, p) {
                    continue;
                }
            }
            pop_while_not_right(view, &mut stack, &mut cache, p)?;
            exit = Some((j, p));
        }
        let exit = exit.map(|(j, _)| j);

        i0 = exit;
        if let Some(e) = exit {
            // One extract costs about 3N/S̄ reads and a sweep about 2N, so after
            // S̄/2 single extracts the sweep is the cheaper way to go on.
            let mut dropped = 0;
            while let Some(j) = pile1.minimum() {
                if j == e {
                    break;
                }
                if dropped == pile1.sbar() / 2 {
                    pile1.discard_below(e)?;
                    break;
                }
                pile1.extract(j)?;
                dropped += 1;
            }
            // Both piles have now lost the slab, so the second one may skip ahead by copying.
            pile2.copy_from(&pile1)?;
        }

        // Report the chain left to right.
        let mut reverse = stack.reoriented(Orientation::Min, meter);
        drop(stack);
        while let Some(t) = reverse.top() {
            reverse.extract(t)?;
            emit(view.point(t));
        }
    }
    Ok(report)
}

/// Points of the two topmost stack entries, when known without a lookup.
#[derive(Default, Clone, Copy)]
struct TopTwo {
    top: Option<Point>,
    below: Option<Point>,
}

/// Pops the stack until its top two points turn right towards `p`.
fn pop_while_not_right<V: View>(
    view: &V,
    stack: &mut AugmentedPile<'_, ByX<'_, V>>,
    cache: &mut TopTwo,
    p: Point,
) -> Result<()> {
    let Some(mut t) = stack.maximum() else { return Ok(()) };
    let mut top = cache.top.unwrap_or_else(|| view.point(t));
    let mut below = cache.below;
    while stack.len() >= 2 {
        let below_pt = match below {
            Some(b) => b,
            None => view.point(stack.next_to_maximum().unwrap()),
        };
        if right_turn(below_pt, top, p) {
            *cache = TopTwo { top: Some(top), below: Some(below_pt) };
            return Ok(());
        }
        stack.extract(t)?;
        t = stack.maximum().unwrap();
        (top, below) = (below_pt, None);
    }
    *cache = TopTwo { top: Some(top), below: None };
    Ok(())
}

fn chan_chen<V: View>(view: &V, s: usize, meter: &WorkspaceMeter, emit: &mut dyn FnMut(Point)) -> HullReport {
    let n = view.n();
    let mut report = HullReport::default();
    let _words = meter.charge_words(3 * s as u64 + 6);
    let mut i0 = None;
    for i in 0..n {
        if i0.is_none_or(|k| view.point(i).x < view.point(k).x) {
            i0 = Some(i);
        }
    }
    let mut buffer: Vec<usize> = Vec::with_capacity(2 * s);
    let mut hull: Vec<usize> = Vec::with_capacity(s);
    while let Some(first) = i0 {
        report.rounds += 1;
        let wall = view.point(first).x;
        buffer.clear();
        for j in 0..n {
            if view.point(j).x < wall {
                continue;
            }
            buffer.push(j);
            if buffer.len() == 2 * s {
                buffer.select_nth_unstable_by_key(s - 1, |&k| view.point(k).x);
                buffer.truncate(s);
            }
        }
        buffer.sort_unstable_by_key(|&k| view.point(k).x);
        buffer.truncate(s);

        hull.clear();
        for &j in &buffer {
            let p = view.point(j);
            while hull.len() >= 2 && !right_turn(view.point(hull[hull.len() - 2]), view.point(hull[hull.len() - 1]), p)
            {
                hull.pop();
            }
            hull.push(j);
        }

        let right_wall = view.point(*buffer.last().unwrap()).x;
        let mut exit: Option<(usize, Point)> = None;
        let mut top = view.point(*hull.last().unwrap());
        for j in 0..n {
            let p = view.point(j);
            if p.x <= right_wall {
                continue;
            }
            if let Some((_, e)) = exit {
                if right_turn(top, e, p) {
                    continue;
                }
            }
            while hull.len() >= 2 {
                let below = view.point(hull[hull.len() - 2]);
                if right_turn(below, top, p) {
                    break;
                }
                hull.pop();
                top = below;
            }
            exit = Some((j, p));
        }
        let exit = exit.map(|(j, _)| j);
        for &k in &hull {
            emit(view.point(k));
        }
        i0 = exit;
    }
    report
}
