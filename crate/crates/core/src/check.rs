//! Randomised invariant suite run by `adjpile selfcheck`.
//!
//! Every check draws a small instance from a seeded generator and compares the
//! structures against direct computations over the whole input.

use std::collections::BTreeSet;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::augpile::{AugmentedPile, Filter, Orientation};
use crate::bitvec::{PackedBits, RankSelect};
use crate::gen::{points, HullShape};
use crate::hull::{chan_chen_upper_hull, convex_hull, cross, upper_hull, Point, PointSource};
use crate::model::{ElementSource, OutputSink, WorkspaceMeter, WORD_BITS};
use crate::navpile::{Mode, NavigationPile};
use crate::sort::{pq_sort, PileKind};
use crate::tournament::TournamentTree;

/// A deliberate defect, used to confirm that the suite notices it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The reference navigation width rule drops its `lg N` cap and adds a bit.
    NavWidth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub invariant: &'static str,
    pub seed: u64,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invariant {} failed (seed {}): {}", self.invariant, self.seed, self.detail)
    }
}

impl std::error::Error for Failure {}

type Check = fn(&mut StdRng, Option<Fault>) -> Result<(), String>;

pub const INVARIANTS: [&str; 8] = [
    "sort-oracle",
    "rebuilding-stream",
    "general-navpile",
    "workspace-budget",
    "nav-bit-budget",
    "rank-select",
    "augpile-oracle",
    "hull-oracle",
];

const CHECKS: [Check; 8] = [
    sort_oracle,
    rebuilding_stream,
    general_navpile,
    workspace_budget,
    nav_bit_budget,
    rank_select,
    augpile_oracle,
    hull_oracle,
];

/// Runs every invariant for seeds `0..seeds` and returns the number of instances checked.
pub fn run(seeds: u64, fault: Option<Fault>) -> Result<usize, Failure> {
    let mut done = 0;
    for seed in 0..seeds {
        for (invariant, check) in INVARIANTS.iter().zip(CHECKS) {
            let mut rng = StdRng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ done as u64);
            check(&mut rng, fault).map_err(|detail| Failure { invariant, seed, detail })?;
            done += 1;
        }
    }
    Ok(done)
}

fn random_values(rng: &mut StdRng, n: usize) -> Vec<u64> {
    let range = if rng.gen_bool(0.5) { (n as u64 / 3).max(1) } else { 1 << 32 };
    (0..n).map(|_| rng.gen_range(0..range)).collect()
}

fn sort_oracle(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let n = rng.gen_range(0..400);
    let s = rng.gen_range(1..64);
    let data = random_values(rng, n);
    let mut expected = data.clone();
    expected.sort_unstable();
    for kind in PileKind::ALL {
        let src = ElementSource::new(data.clone());
        let mut sink = OutputSink::new();
        pq_sort(&src, s, &mut sink, kind).map_err(|e| format!("{kind} on N={n}, S={s}: {e}"))?;
        if sink.as_slice() != expected {
            return Err(format!("{kind} output differs from the sorted input for N={n}, S={s}"));
        }
    }
    Ok(())
}

fn rebuilding_stream(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let n = rng.gen_range(1..700);
    let s = rng.gen_range(1..64);
    let data = random_values(rng, n);
    let known = ElementSource::new(data.clone());
    let stream = ElementSource::streaming(data);
    let (mut a, mut b) = (OutputSink::new(), OutputSink::new());
    pq_sort(&known, s, &mut a, PileKind::Navigation).map_err(|e| e.to_string())?;
    let report = pq_sort(&stream, s, &mut b, PileKind::Rebuilding).map_err(|e| e.to_string())?;
    if a.as_slice() != b.as_slice() {
        return Err(format!("stream output differs from known-length output for N={n}"));
    }
    let expected = if n > 8 { (n as f64 / 8.0).log2().ceil() as usize } else { 0 };
    if report.rebuilds != expected {
        return Err(format!("{} rebuilds for N={n}, expected {expected}", report.rebuilds));
    }
    Ok(())
}

fn general_navpile(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let n = rng.gen_range(1..300);
    let s = rng.gen_range(1..48);
    let data = random_values(rng, n);
    let src = ElementSource::new(data.clone());
    let meter = WorkspaceMeter::new();
    let mut pile = NavigationPile::new(&src, n, s, Mode::GENERAL, &meter);
    let mut model = BTreeSet::new();
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        if model.remove(&(data[i], i)) {
            pile.extract(i).map_err(|e| e.to_string())?;
        } else {
            pile.insert(i).map_err(|e| e.to_string())?;
            model.insert((data[i], i));
        }
        let want = model.first().map(|&(_, i)| i);
        if pile.minimum() != want {
            return Err(format!("minimum {:?}, expected {want:?}", pile.minimum()));
        }
    }
    pile.verify()
}

fn sbar_of(n: usize, s: usize) -> u64 {
    s.max(1).next_power_of_two().min(n.next_power_of_two()) as u64
}

fn lg(x: u64) -> u64 {
    x.max(1).trailing_zeros() as u64
}

fn workspace_budget(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let n: usize = rng.gen_range(16..2000);
    let s = 1usize << rng.gen_range(2..=n.ilog2().min(10));
    let sbar = sbar_of(n, s);
    let header_budget = 4 * WORD_BITS * (lg(sbar) + 2);
    let data = random_values(rng, n);
    let src = ElementSource::new(data.clone());
    let within = |what: &str, m: &WorkspaceMeter, payload: u64| -> Result<(), String> {
        if m.peak_bits() > payload {
            return Err(format!("{what} payload {} bits exceeds {payload} for N={n}, S̄={sbar}", m.peak_bits()));
        }
        if m.peak_words() * WORD_BITS > header_budget {
            return Err(format!("{what} uses {} words for N={n}, S̄={sbar}", m.peak_words()));
        }
        Ok(())
    };
    let m = WorkspaceMeter::new();
    drop(NavigationPile::new(&src, n, s, Mode::SORTING, &m));
    within("navigation pile", &m, 8 * sbar)?;
    let m = WorkspaceMeter::new();
    drop(NavigationPile::new(&src, n, s, Mode::GENERAL, &m));
    within("non-monotone navigation pile", &m, 8 * sbar + n as u64)?;
    let m = WorkspaceMeter::new();
    drop(TournamentTree::new(&src, n, s, &m));
    within("tournament tree", &m, (2 * sbar - 1) * WORD_BITS)?;
    let mut sorted = data;
    sorted.sort_unstable();
    sorted.dedup();
    let lo = rng.gen_range(0..sorted.len());
    let hi = (lo + s - 1).min(sorted.len() - 1);
    let m = WorkspaceMeter::new();
    let pile = AugmentedPile::build(&src, n, s, Filter::inclusive(sorted[lo], sorted[hi]), Orientation::Max, &m);
    match pile {
        Ok(p) => drop(p),
        // Duplicates can push a window of s distinct values past s candidates.
        Err(crate::Error::TooManyCandidates { .. }) => return Ok(()),
        Err(e) => return Err(e.to_string()),
    }
    within("augmented pile", &m, 16 * sbar)
}

/// Navigation bits summed from the width rule `min(2h, ⌈lg N⌉)`.
fn reference_nav_bits(n: usize, s: usize, fault: Option<Fault>) -> usize {
    let sbar = sbar_of(n, s) as usize;
    let lgn = (usize::BITS - (n - 1).leading_zeros()).max(1) as usize;
    (1..=sbar.trailing_zeros() as usize)
        .map(|h| {
            let width = match fault {
                Some(Fault::NavWidth) => 2 * h + 1,
                None => (2 * h).min(lgn),
            };
            (sbar >> h) * width
        })
        .sum()
}

fn nav_bit_budget(rng: &mut StdRng, fault: Option<Fault>) -> Result<(), String> {
    let n = rng.gen_range(2..1 << 14);
    let s = rng.gen_range(2..1 << 11);
    let src = ElementSource::new(vec![0u64; n]);
    let m = WorkspaceMeter::new();
    let pile = NavigationPile::new(&src, n, s, Mode::SORTING, &m);
    let expected = reference_nav_bits(n, s, fault);
    let sbar = pile.sbar();
    if pile.nav_bits() != expected {
        return Err(format!("N={n}, S={s}: {} navigation bits, width rule gives {expected}", pile.nav_bits()));
    }
    if expected >= 4 * sbar {
        return Err(format!("N={n}, S={s}: {expected} navigation bits reach 4·S̄ = {}", 4 * sbar));
    }
    Ok(())
}

fn rank_select(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let len = rng.gen_range(0..=4096);
    let density = rng.gen_range(0.0..=1.0);
    let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
    let rs = RankSelect::new(PackedBits::from_bits(bits.iter().copied()));
    let mut ones = vec![];
    let mut zeros = vec![];
    let mut worst = 0;
    let mut measure = |rs: &RankSelect| {
        worst = worst.max(rs.word_reads());
        rs.reset_word_reads();
    };
    for (i, &b) in bits.iter().enumerate() {
        if b {
            ones.push(i)
        } else {
            zeros.push(i)
        }
        rs.reset_word_reads();
        if rs.access(i) != b || rs.rank(i) != ones.len() {
            return Err(format!("access or rank at {i} of a {len}-bit vector"));
        }
        measure(&rs);
        if rs.rank0(i) + rs.rank(i) != i + 1 {
            return Err(format!("rank and rank0 at {i} do not sum to {}", i + 1));
        }
        measure(&rs);
    }
    for (targets, one) in [(&ones, true), (&zeros, false)] {
        for (j, &pos) in targets.iter().enumerate() {
            rs.reset_word_reads();
            let got = if one { rs.select(j + 1) } else { rs.select0(j + 1) };
            measure(&rs);
            if got != Some(pos) {
                return Err(format!("select{} ({}) = {got:?}, expected {pos}", if one { "" } else { "0" }, j + 1));
            }
            let back = if one { rs.rank(pos) } else { rs.rank0(pos) };
            if back != j + 1 {
                return Err(format!("rank of select({}) is {back}", j + 1));
            }
        }
    }
    if rs.select(ones.len() + 1).is_some() || rs.select0(zeros.len() + 1).is_some() {
        return Err("select past the last bit returned a position".into());
    }
    if worst > 8 {
        return Err(format!("a query touched {worst} words"));
    }
    Ok(())
}

fn augpile_oracle(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let n = rng.gen_range(1..=512);
    let s = rng.gen_range(1..=64);
    let data = random_values(rng, n);
    let mut sorted = data.clone();
    sorted.sort_unstable();
    let lo = sorted[rng.gen_range(0..n)];
    let hi = sorted.iter().copied().filter(|&x| x >= lo).nth(s.min(n) - 1).unwrap_or(lo);
    let filter = Filter::inclusive(lo, hi);
    let orientation = if rng.gen_bool(0.5) { Orientation::Max } else { Orientation::Min };
    let src = ElementSource::new(data.clone());
    let meter = WorkspaceMeter::new();
    let candidates: Vec<usize> = (0..n).filter(|&i| filter.contains(&data[i])).collect();
    let mut pile = match AugmentedPile::build(&src, n, s, filter, orientation, &meter) {
        Ok(p) => p,
        Err(crate::Error::TooManyCandidates { .. }) if candidates.len() > s => return Ok(()),
        Err(e) => return Err(e.to_string()),
    };
    let mut alive = BTreeSet::new();
    for _ in 0..3 * candidates.len() {
        let i = candidates[rng.gen_range(0..candidates.len())];
        if alive.remove(&(data[i], i)) {
            pile.extract(i).map_err(|e| e.to_string())?;
        } else {
            pile.insert(i).map_err(|e| e.to_string())?;
            alive.insert((data[i], i));
        }
        let want = match orientation {
            Orientation::Max => alive.last(),
            Orientation::Min => alive.first(),
        };
        if pile.top() != want.map(|&(_, i)| i) {
            return Err(format!("top {:?}, expected {want:?}", pile.top()));
        }
        pile.verify()?;
    }
    Ok(())
}

/// Upper hull by Andrew's monotone chain, left to right.
fn chain(points: &[Point], upper: bool) -> Vec<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|p| p.x);
    let mut hull: Vec<Point> = Vec::new();
    for &p in &sorted {
        while hull.len() >= 2 {
            let c = cross(hull[hull.len() - 2], hull[hull.len() - 1], p);
            if (upper && c < 0) || (!upper && c > 0) {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

fn hull_oracle(rng: &mut StdRng, _: Option<Fault>) -> Result<(), String> {
    let shape = HullShape::ALL[rng.gen_range(0..HullShape::ALL.len())];
    let n = rng.gen_range(1..300);
    let s = rng.gen_range(2..64);
    let pts = points(shape, n, rng.gen());
    let src = PointSource::new(pts.clone()).map_err(|e| e.to_string())?;
    let upper = chain(&pts, true);
    let mut full = upper.clone();
    let lower = chain(&pts, false);
    if lower.len() > 2 {
        full.extend(lower[1..lower.len() - 1].iter().rev());
    }
    let run = |f: fn(&PointSource, usize, &mut OutputSink<Point>) -> crate::Result<crate::hull::HullReport>| {
        let mut sink = OutputSink::new();
        f(&src, s, &mut sink).map(|_| sink.into_vec()).map_err(|e| e.to_string())
    };
    if run(upper_hull)? != upper {
        return Err(format!("upper hull of {n} {shape} points with S={s}"));
    }
    if run(convex_hull)? != full {
        return Err(format!("convex hull of {n} {shape} points with S={s}"));
    }
    if run(chan_chen_upper_hull)? != upper {
        return Err(format!("baseline upper hull of {n} {shape} points with S={s}"));
    }
    Ok(())
}
