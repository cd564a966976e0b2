//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line, uncaptured, with its measured numbers.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use adjpile::gen::{distinct_values, points, values_with_duplicates, HullShape};
use adjpile::hull::{chan_chen_upper_hull, convex_hull, upper_hull};
use adjpile::{
    pq_sort, AugmentedPile, ElementSource, Filter, Mode, NavigationPile, Orientation, OutputSink, PackedBits, PileKind,
    PointSource, PriorityQueue, RankSelect, RebuildingPile, TournamentTree, WorkspaceMeter, WORD_BITS,
};
use common::{ceil_lg, sbar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// Name, runtime limit and check.
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

const SORT_LIMIT: Duration = Duration::from_secs(60);
const COMPARISON_LIMIT: Duration = Duration::from_secs(30);
const HULL_LIMIT: Duration = Duration::from_secs(120);

const COMPARISON_SLACK_PER_ELEMENT: f64 = 16.0;
const PLAIN_PAYLOAD_PER_SLOT: u64 = 8;
const AUGMENTED_PAYLOAD_PER_SLOT: u64 = 16;
const HEADER_WORDS_PER_LEVEL: u64 = 4;
const EXTRACT_READS_PER_BUCKET: u64 = 3;
const EXTRACT_READS_PER_LEVEL: u64 = 2;
const EXTRACT_READS_CONSTANT: u64 = 8;
const SORT_READ_FACTOR: f64 = 8.0;
const HULL_READ_FACTOR: f64 = 12.0;
const RANK_SELECT_WORD_READS: u64 = 8;

fn main() {
    let criteria: [Criterion; 10] = [
        ("sorting correctness", Some(SORT_LIMIT), sorting_correctness),
        ("comparison bound", Some(COMPARISON_LIMIT), comparison_bound),
        ("workspace bound", None, workspace_bound),
        ("access-count scaling", None, access_scaling),
        ("navigation-bit budget", None, nav_bit_budget),
        ("rank/select correctness", None, rank_select),
        ("hull correctness", Some(HULL_LIMIT), hull_correctness),
        ("hull cost scaling", None, hull_cost),
        ("global rebuilding", None, global_rebuilding),
        ("augmented-pile oracle", None, augmented_oracle),
    ];
    let mut failed = 0;
    for (k, (name, limit, check)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let mut outcome = check();
        let elapsed = t.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, limit) {
            if elapsed >= limit {
                outcome = Err(format!("{detail}; runtime {elapsed:.1?} over the {limit:?} limit"));
            }
        }
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {elapsed:.1?})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {elapsed:.1?})", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lg(x: usize) -> f64 {
    (x as f64).log2()
}

/// Workspace targets `⌈lg N⌉`, `⌈√N⌉` and `⌈N / lg N⌉`, each at least 1.
fn sort_targets(n: usize) -> [usize; 3] {
    let lgn = lg(n.max(1)).max(1.0);
    [ceil_lg(n) as usize, (n as f64).sqrt().ceil() as usize, (n as f64 / lgn).ceil() as usize].map(|s| s.max(1))
}

/// Arrays per `(N, S)` cell, one row per N and one column per target. The
/// largest inputs get a single array each so the suite fits its time limit.
const SORT_CELLS: [(usize, [usize; 3]); 7] = [
    (0, [12, 12, 12]),
    (1, [12, 12, 12]),
    (2, [12, 12, 12]),
    (10, [15, 15, 14]),
    (1_000, [10, 10, 10]),
    (10_000, [3, 6, 6]),
    (100_000, [1, 1, 1]),
];

fn source_for(kind: PileKind, data: &[u64]) -> ElementSource<u64> {
    match kind {
        PileKind::Rebuilding => ElementSource::streaming(data.to_vec()),
        _ => ElementSource::new(data.to_vec()),
    }
}

fn sorting_correctness() -> Outcome {
    let mut arrays = 0;
    let mut seed = 0;
    for (n, counts) in SORT_CELLS {
        for (s, count) in sort_targets(n).into_iter().zip(counts) {
            for _ in 0..count {
                seed += 1;
                let data = values_with_duplicates(n, seed);
                let expect = common::sorted(&data);
                for kind in PileKind::ALL {
                    let mut sink = OutputSink::new();
                    pq_sort(&source_for(kind, &data), s, &mut sink, kind)
                        .map_err(|e| format!("{kind} N={n} S={s} seed {seed}: {e}"))?;
                    ensure(sink.as_slice() == expect, || format!("{kind} N={n} S={s} seed {seed}: wrong order"))?;
                }
                arrays += 1;
            }
        }
    }
    ensure(arrays == 200, || format!("{arrays} arrays instead of 200"))?;
    Ok(format!("{arrays} arrays x 3 piles match the oracle"))
}

fn comparison_bound() -> Outcome {
    let n = 4096usize;
    let mut worst: f64 = 0.0;
    for sb in [64usize, 256, 1024] {
        let bound = 2.0 * (n * n) as f64 / sb as f64 + n as f64 * lg(sb) + COMPARISON_SLACK_PER_ELEMENT * n as f64;
        for seed in 0..20 {
            let data = if seed % 2 == 0 { distinct_values(n, seed) } else { values_with_duplicates(n, seed) };
            for kind in PileKind::ALL {
                let r =
                    pq_sort(&source_for(kind, &data), sb, &mut OutputSink::new(), kind).map_err(|e| e.to_string())?;
                ensure(r.sbar == sb, || format!("S̄ = {} for S = {sb}", r.sbar))?;
                let c = r.comparisons as f64;
                ensure(c <= bound, || format!("{kind} S̄={sb} seed {seed}: {c} comparisons > {bound}"))?;
                worst = worst.max(c / bound);
            }
        }
    }
    Ok(format!("worst comparisons/bound {worst:.3} over 180 runs"))
}

fn drain<P: PriorityQueue>(pile: &mut P, n: usize) -> Result<(), String> {
    for i in 0..n {
        pile.insert(i).map_err(|e| e.to_string())?;
    }
    pile.settle();
    while let Some(j) = pile.minimum() {
        pile.extract(j).map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Runs `work` against a fresh meter and returns (peak payload bits, peak words).
fn metered(work: impl FnOnce(&WorkspaceMeter) -> Result<(), String>) -> Result<(u64, u64), String> {
    let m = WorkspaceMeter::new();
    work(&m)?;
    ensure(m.bits() == 0 && m.words() == 0, || "charges outlived their structure".into())?;
    Ok((m.peak_bits(), m.peak_words()))
}

fn workspace_grid() -> Vec<(usize, usize)> {
    let mut grid = vec![(64, 16), (1000, 16), (1000, 512), (5000, 128)];
    for ln in 10..=14 {
        for ls in 4..=10 {
            grid.push((1 << ln, 1 << ls));
        }
    }
    grid
}

fn workspace_bound() -> Outcome {
    let (mut worst_plain, mut worst_aug, mut worst_header, mut worst_rebuild): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0);
    let mut builds = 0;
    for (n, s) in workspace_grid() {
        let sb = sbar(n, s) as u64;
        let plain = PLAIN_PAYLOAD_PER_SLOT * sb;
        let headers = HEADER_WORDS_PER_LEVEL * WORD_BITS * (sb.ilog2() as u64 + 2);
        let data = distinct_values(n, (n * 31 + s) as u64);
        let src = ElementSource::new(data.clone());
        let at = |what: &str| format!("{what} N={n} S̄={sb}");
        let header_ok = |what: &str, words: u64| {
            ensure(words * WORD_BITS <= headers, || {
                format!("{}: {} header bits > {headers}", at(what), words * WORD_BITS)
            })
        };

        let (bits, words) = metered(|m| drain(&mut NavigationPile::new(&src, n, s, Mode::SORTING, m), n))?;
        ensure(bits <= plain, || format!("{}: {bits} bits > {plain}", at("navigation pile")))?;
        header_ok("navigation pile", words)?;
        worst_plain = worst_plain.max(bits as f64 / plain as f64);
        worst_header = worst_header.max((words * WORD_BITS) as f64 / headers as f64);

        let (general, words) = metered(|m| drain(&mut NavigationPile::new(&src, n, s, Mode::GENERAL, m), n))?;
        ensure(general == bits + n as u64, || {
            format!("{}: {general} bits, expected {} + N", at("general pile"), bits)
        })?;
        header_ok("general pile", words)?;

        let (bits, words) = metered(|m| drain(&mut TournamentTree::new(&src, n, s, m), n))?;
        let slots = (2 * sb - 1) * WORD_BITS;
        ensure(bits <= slots, || format!("{}: {bits} bits > {slots}", at("tournament tree")))?;
        header_ok("tournament tree", words)?;

        // During a handover the active pile and its shadow coexist: two
        // navigation piles, each within its own 8S̄, are held to twice that.
        let stream = ElementSource::streaming(data.clone());
        let (bits, words) = metered(|m| drain(&mut RebuildingPile::new(&stream, s, m), n))?;
        ensure(bits <= 2 * plain, || format!("{}: {bits} bits > 2 x {plain}", at("rebuilding pile")))?;
        ensure(words * WORD_BITS <= 2 * headers, || format!("{}: {words} words", at("rebuilding pile")))?;
        worst_rebuild = worst_rebuild.max(bits as f64 / plain as f64);

        // A window holding exactly min(S, N) candidates.
        let sorted = common::sorted(&data);
        let take = s.min(n);
        let filter = Filter::inclusive(sorted[0], sorted[take - 1]);
        let aug = AUGMENTED_PAYLOAD_PER_SLOT * sb;
        let (bits, words) = metered(|m| {
            let mut pile = AugmentedPile::build(&src, n, s, filter, Orientation::Max, m).map_err(|e| e.to_string())?;
            let cands: Vec<usize> = (0..n).filter(|&i| data[i] <= sorted[take - 1]).collect();
            for &i in &cands {
                pile.insert(i).map_err(|e| e.to_string())?;
            }
            while let Some(j) = pile.maximum() {
                pile.extract(j).map_err(|e| e.to_string())?;
            }
            Ok(())
        })?;
        ensure(bits <= aug, || format!("{}: {bits} bits > {aug}", at("augmented pile")))?;
        header_ok("augmented pile", words)?;
        worst_aug = worst_aug.max(bits as f64 / aug as f64);
        builds += 5;
    }
    Ok(format!(
        "{builds} builds; worst payload/bound: navigation {worst_plain:.2}, augmented {worst_aug:.2}; headers {worst_header:.2}; general mode adds exactly N; rebuilding pile (active + shadow) peaks at {worst_rebuild:.2} x 8S̄"
    ))
}

fn access_scaling() -> Outcome {
    let mut worst_extract: f64 = 0.0;
    let mut worst_total: f64 = 0.0;
    for ln in 10..=14 {
        for ls in 4..=10 {
            let (n, sb) = (1usize << ln, 1usize << ls);
            let per_extract = EXTRACT_READS_PER_BUCKET * n.div_ceil(sb) as u64
                + EXTRACT_READS_PER_LEVEL * ls as u64
                + EXTRACT_READS_CONSTANT;
            let total = SORT_READ_FACTOR * ((n * n) as f64 / sb as f64 + n as f64 * ls as f64);
            let data = distinct_values(n, (ln * 100 + ls) as u64);
            for kind in PileKind::ALL {
                let r = pq_sort(&source_for(kind, &data), sb, &mut OutputSink::new(), kind)
                    .map_err(|e| e.to_string())?;
                let at = format!("{kind} N={n} S̄={sb}");
                ensure(r.max_extract_reads <= per_extract, || {
                    format!("{at}: an extract read {} elements > {per_extract}", r.max_extract_reads)
                })?;
                ensure(r.element_reads as f64 <= total, || format!("{at}: {} reads > {total}", r.element_reads))?;
                worst_extract = worst_extract.max(r.max_extract_reads as f64 / per_extract as f64);
                worst_total = worst_total.max(r.element_reads as f64 / total);
            }
        }
    }
    Ok(format!("worst per-extract/bound {worst_extract:.3}, total/bound {worst_total:.3}"))
}

/// Navigation bits counted node by node from the width rule: a height-h node
/// stores a bucket offset and a quantile, `min(2h, ⌈lg N⌉)` bits in all.
fn nav_bits_oracle(n: usize, s: usize) -> usize {
    let sb = sbar(n, s);
    let lgn = ceil_lg(n).max(1) as usize;
    let mut total = 0;
    let mut nodes = sb / 2;
    let mut h = 1;
    while nodes > 0 {
        for _ in 0..nodes {
            total += (2 * h).min(lgn);
        }
        nodes /= 2;
        h += 1;
    }
    total
}

fn nav_bit_budget() -> Outcome {
    let src = ElementSource::new(vec![0u64; 1 << 14]);
    let m = WorkspaceMeter::new();
    let example = NavigationPile::new(&src, 64, 8, Mode::SORTING, &m).nav_bits();
    ensure(example == 22, || format!("N=64 S̄=8 has {example} navigation bits, expected 22"))?;
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for n in [2, 3, 64, 100, 1000, 1 << 10, 1 << 12, 5000, 1 << 14] {
        for ls in 0..=11 {
            let s = 1usize << ls;
            let bits = NavigationPile::new(&src, n, s, Mode::SORTING, &m).nav_bits();
            let expect = nav_bits_oracle(n, s);
            let sb = sbar(n, s);
            ensure(bits == expect, || format!("N={n} S={s}: {bits} bits, oracle {expect}"))?;
            ensure(bits < 4 * sb, || format!("N={n} S̄={sb}: {bits} bits not below 4S̄"))?;
            worst = worst.max(bits as f64 / (4 * sb) as f64);
            points += 1;
        }
    }
    Ok(format!("{points} grid points match the width-rule sum; worst bits/4S̄ {worst:.3}; N=64 S̄=8 gives 22"))
}

fn rank_select() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut queries = 0u64;
    let mut most = 0;
    for v in 0..100 {
        let len = rng.gen_range(1..=4096);
        let density = [0.0, 0.02, 0.3, 0.5, 0.9, 1.0][v % 6];
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
        let rs = RankSelect::new(PackedBits::from_bits(bits.iter().copied()));
        let mut probe = |what: &str, got: Option<usize>, want: Option<usize>| -> Result<(), String> {
            queries += 1;
            most = most.max(rs.word_reads());
            ensure(got == want, || format!("vector {v}: {what} gave {got:?}, oracle {want:?}"))?;
            ensure(rs.word_reads() <= RANK_SELECT_WORD_READS, || {
                format!("vector {v}: {what} read {} words", rs.word_reads())
            })?;
            rs.reset_word_reads();
            Ok(())
        };
        let ones: Vec<usize> = (0..len).filter(|&i| bits[i]).collect();
        let zeros: Vec<usize> = (0..len).filter(|&i| !bits[i]).collect();
        let mut seen = 0;
        rs.reset_word_reads();
        for (i, &bit) in bits.iter().enumerate() {
            seen += bit as usize;
            probe("access", Some(rs.access(i) as usize), Some(bit as usize))?;
            probe("rank", Some(rs.rank(i)), Some(seen))?;
            probe("rank0", Some(rs.rank0(i)), Some(i + 1 - seen))?;
        }
        for j in 1..=ones.len() + 1 {
            let got = rs.select(j);
            probe("select", got, ones.get(j - 1).copied())?;
            if let Some(i) = got {
                ensure(rs.rank(i) == j && rs.access(i), || format!("vector {v}: rank(select({j})) != {j}"))?;
                rs.reset_word_reads();
            }
        }
        for j in 1..=zeros.len() + 1 {
            let got = rs.select0(j);
            probe("select0", got, zeros.get(j - 1).copied())?;
            if let Some(i) = got {
                ensure(rs.rank0(i) == j && !rs.access(i), || format!("vector {v}: rank0(select0({j})) != {j}"))?;
                rs.reset_word_reads();
            }
        }
        ensure(rs.index_bits() <= 2 * len as u64, || format!("vector {v}: {} index bits", rs.index_bits()))?;
    }
    Ok(format!("{queries} queries on 100 vectors agree; duality holds; at most {most} word reads per query"))
}

const HULL_NS: [usize; 4] = [3, 10, 1_000, 10_000];
const HULL_SS: [usize; 4] = [16, 64, 256, 1024];

/// Instance `k` of a shape lands on cell `(N, S)` cyclically, so each of the
/// sixteen cells gets six or seven of the hundred instances.
fn hull_cell(k: usize) -> (usize, usize) {
    (HULL_NS[k % 4], HULL_SS[(k / 4) % 4])
}

fn run_hull(
    f: fn(&PointSource, usize, &mut OutputSink<adjpile::Point>) -> adjpile::Result<adjpile::hull::HullReport>,
    src: &PointSource,
    s: usize,
) -> Result<(Vec<adjpile::Point>, adjpile::hull::HullReport), String> {
    let mut sink = OutputSink::new();
    let r = f(src, s, &mut sink).map_err(|e| e.to_string())?;
    Ok((sink.into_vec(), r))
}

fn hull_correctness() -> Outcome {
    let mut instances = 0;
    for shape in HullShape::ALL {
        for k in 0..100 {
            let (n, s) = hull_cell(k);
            let seed = 1000 + k as u64;
            let pts = points(shape, n, seed);
            let src = PointSource::new(pts.clone()).map_err(|e| e.to_string())?;
            let at = format!("{shape} N={n} S={s} seed {seed}");
            let (upper, _) = run_hull(upper_hull, &src, s)?;
            ensure(upper == common::upper_hull(&pts), || format!("{at}: upper hull differs from the oracle"))?;
            let (full, _) = run_hull(convex_hull, &src, s)?;
            ensure(full == common::convex_hull(&pts), || format!("{at}: convex hull differs from the oracle"))?;
            let (baseline, _) = run_hull(chan_chen_upper_hull, &src, s)?;
            ensure(baseline == upper, || format!("{at}: baseline differs from upper_hull"))?;
            instances += 1;
        }
    }
    Ok(format!("{instances} instances, 3 algorithms each, match"))
}

fn hull_cost() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for shape in HullShape::ALL {
        for n in [1_000usize, 10_000] {
            let src = PointSource::new(points(shape, n, 77)).map_err(|e| e.to_string())?;
            for s in HULL_SS {
                for f in [upper_hull, convex_hull] {
                    let (_, r) = run_hull(f, &src, s)?;
                    let sb = r.sbar;
                    let bound = HULL_READ_FACTOR * ((n * n) as f64 / sb as f64 + n as f64 * lg(sb));
                    let at = format!("{shape} N={n} S={s}");
                    ensure(r.point_reads as f64 <= bound, || format!("{at}: {} point reads > {bound}", r.point_reads))?;
                    worst = worst.max(r.point_reads as f64 / bound);
                    runs += 1;
                }
                let (_, r) = run_hull(upper_hull, &src, s)?;
                let rounds = n.div_ceil(s) + 1;
                ensure(r.rounds <= rounds, || format!("{shape} N={n} S={s}: {} rounds > {rounds}", r.rounds))?;
            }
        }
    }
    Ok(format!("{runs} runs; worst point reads/bound {worst:.3}; rounds within ⌈N/S⌉ + 1"))
}

fn global_rebuilding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..50 {
        let n = if k < 2 { [5, 5000][k] } else { rng.gen_range(5..=5000) };
        let s = rng.gen_range(4..=256);
        let data = values_with_duplicates(n, 500 + k as u64);
        let mut known = OutputSink::new();
        pq_sort(&ElementSource::new(data.clone()), s, &mut known, PileKind::Navigation).map_err(|e| e.to_string())?;
        let mut streamed = OutputSink::new();
        let r = pq_sort(&ElementSource::streaming(data), s, &mut streamed, PileKind::Rebuilding)
            .map_err(|e| e.to_string())?;
        ensure(streamed == known, || format!("stream {k} N={n} S={s}: output differs from the known-N sort"))?;
        let expect = if n > 8 { ceil_lg(n.div_ceil(8)) as usize } else { 0 };
        ensure(r.rebuilds == expect, || format!("stream {k} N={n}: {} rebuilds, expected {expect}", r.rebuilds))?;
    }
    Ok("50 streams equal their known-N sorts; rebuild counts equal ⌈lg(N/8)⌉".into())
}

fn augmented_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut ops, mut cases) = (0, 0);
    let mut k = 0;
    while cases < 500 {
        k += 1;
        let n = rng.gen_range(1..=512);
        let s = rng.gen_range(1..=64);
        let data: Vec<u64> = (0..n).map(|_| rng.gen_range(0..2 * n as u64)).collect();
        let mut distinct = common::sorted(&data);
        distinct.dedup();
        // Count candidates per window bound and keep the widest window of at most min(S, N).
        let a = rng.gen_range(0..distinct.len());
        let mut b = a;
        let within = |hi: u64| data.iter().filter(|&&x| x >= distinct[a] && x <= hi).count();
        while b + 1 < distinct.len() && within(distinct[b + 1]) <= s.min(n) {
            b += 1;
        }
        if within(distinct[b]) > s.min(n) {
            continue;
        }
        cases += 1;
        let filter = Filter::inclusive(distinct[a], distinct[b]);
        let orientation = if k % 2 == 0 { Orientation::Max } else { Orientation::Min };
        let src = ElementSource::new(data.clone());
        let m = WorkspaceMeter::new();
        let mut pile =
            AugmentedPile::build(&src, n, s, filter, orientation, &m).map_err(|e| format!("case {k}: {e}"))?;
        let cands: Vec<usize> = (0..n).filter(|&i| filter.contains(&data[i])).collect();
        let mut alive = BTreeSet::new();
        for _ in 0..3 * cands.len() {
            let i = cands[rng.gen_range(0..cands.len())];
            if alive.remove(&(data[i], i)) {
                pile.extract(i).map_err(|e| format!("case {k}: {e}"))?;
            } else {
                pile.insert(i).map_err(|e| format!("case {k}: {e}"))?;
                alive.insert((data[i], i));
            }
            let want = match orientation {
                Orientation::Max => alive.last(),
                Orientation::Min => alive.first(),
            };
            ensure(pile.top() == want.map(|&(_, i)| i), || format!("case {k}: top {:?}, oracle {want:?}", pile.top()))?;
            if orientation == Orientation::Max {
                ensure(pile.maximum() == pile.top(), || format!("case {k}: maximum disagrees with top"))?;
            }
            pile.verify().map_err(|e| format!("case {k}: {e}"))?;
            ops += 1;
        }
    }
    Ok(format!(
        "{cases} interleavings, {ops} operations; top matches brute force and the from-scratch sweep passes after each"
    ))
}
