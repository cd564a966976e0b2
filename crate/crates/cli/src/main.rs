//! `adjpile`: sort and convex hull under a workspace budget, plus benchmark
//! grids and a self-check.
//!
//! Exit status: 0 on success, 1 for unreadable or invalid input, 2 when an
//! invariant or structural contract fails.

mod bench;
mod io;
mod metrics;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use adjpile::check::{self, Fault};
use adjpile::gen::HullShape;
use adjpile::hull::{check_distinct, convex_hull};
use adjpile::{pq_sort, ElementSource, Error, OutputSink, PileKind, PointSource};
use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{Algorithm, Grid};
use crate::io::Format;
use crate::metrics::MetricsRecord;

#[derive(Parser)]
#[command(name = "adjpile", version, about = "Sorting and convex hulls in adjustable workspace")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pile {
    Tournament,
    Navpile,
    Rebuilding,
}

impl From<Pile> for PileKind {
    fn from(p: Pile) -> Self {
        match p {
            Pile::Tournament => PileKind::Tournament,
            Pile::Navpile => PileKind::Navigation,
            Pile::Rebuilding => PileKind::Rebuilding,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Disc,
    ParabolaUp,
    ParabolaDown,
    Clustered,
}

impl From<Shape> for HullShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Disc => HullShape::Disc,
            Shape::ParabolaUp => HullShape::ParabolaUp,
            Shape::ParabolaDown => HullShape::ParabolaDown,
            Shape::Clustered => HullShape::Clustered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InjectedFault {
    NavWidth,
}

#[derive(clap::Args)]
struct Files {
    #[arg(long)]
    input: PathBuf,
    /// Result file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Workspace target S.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
    space_bits: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Appends one JSON line per run here; standard error when absent.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sorts unsigned integers.
    Sort {
        #[command(flatten)]
        files: Files,
        #[arg(long, value_enum, default_value_t = Pile::Navpile)]
        pile: Pile,
    },
    /// Prints the convex hull vertices clockwise, starting at the leftmost point.
    Hull {
        #[command(flatten)]
        files: Files,
    },
    /// Writes a CSV of metrics over a grid of input sizes and workspace targets.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [4096usize, 8192, 16384])]
        grid_n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 256, 1024])]
        grid_s: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',')]
        algorithms: Option<Vec<Algorithm>>,
        #[arg(long, value_enum, default_value_t = Shape::Disc)]
        shape: Shape,
        /// Writes 0 for wall time so that equal seeds give byte-identical files.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs the randomised invariant suite.
    Selfcheck {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<InjectedFault>,
    },
}

enum Failure {
    Input(anyhow::Error),
    Invariant(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Contract(_) | Error::TooManyCandidates { .. } | Error::NotCandidate(_)) => {
                Failure::Invariant(e)
            }
            _ => Failure::Input(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn warn_below_regime(n: usize, s: usize) {
    let lg = (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize;
    if n > 1 && s < lg {
        eprintln!("warning: S = {s} is below lg N = {lg}; bounds assume S ≥ lg N");
    }
}

fn sort(files: &Files, pile: Pile) -> Result<(), Failure> {
    let data = io::read_values(&files.input, files.format)?;
    let s = files.space_bits as usize;
    warn_below_regime(data.len(), s);
    let kind = PileKind::from(pile);
    let n = data.len();
    let src = if kind == PileKind::Rebuilding { ElementSource::streaming(data) } else { ElementSource::new(data) };
    let mut sink = OutputSink::new();
    let started = Instant::now();
    let report = pq_sort(&src, s, &mut sink, kind)?;
    let ns = started.elapsed().as_nanos() as u64;
    debug_assert_eq!(report.output_length, n);
    io::write_values(files.output.as_deref(), files.format, sink.as_slice())?;
    let tag = format!("{}-sort", kind.name());
    metrics::emit(files.metrics.as_deref(), &MetricsRecord::from_sort(&tag, s, &report, ns))?;
    Ok(())
}

fn hull(files: &Files) -> Result<(), Failure> {
    let pts = io::read_points(&files.input, files.format)?;
    check_distinct(&pts).map_err(|e| match e {
        Error::DuplicateCoordinate { first, second } => anyhow::anyhow!(
            "points {first} ({} {}) and {second} ({} {}) share a coordinate",
            pts[first].x,
            pts[first].y,
            pts[second].x,
            pts[second].y
        ),
        other => other.into(),
    })?;
    let n = pts.len();
    let s = files.space_bits as usize;
    warn_below_regime(n, s);
    let src = PointSource::new(pts)?;
    let mut sink = OutputSink::new();
    let started = Instant::now();
    let report = convex_hull(&src, s, &mut sink)?;
    let ns = started.elapsed().as_nanos() as u64;
    io::write_points(files.output.as_deref(), files.format, sink.as_slice())?;
    metrics::emit(files.metrics.as_deref(), &MetricsRecord::from_hull("our-hull", n, s, &report, ns))?;
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sort { files, pile } => sort(&files, pile),
        Command::Hull { files } => hull(&files),
        Command::Bench { grid_n, grid_s, seed, algorithms, shape, no_timing, output } => {
            let grid = Grid {
                ns: grid_n,
                ss: grid_s,
                algorithms: algorithms.unwrap_or_else(|| Algorithm::value_variants().to_vec()),
                seed,
                shape: shape.into(),
                timing: !no_timing,
            };
            match output {
                Some(p) => {
                    let f = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    bench::run(&grid, f)?;
                }
                None => {
                    bench::run(&grid, std::io::stdout().lock())?;
                }
            }
            Ok(())
        }
        Command::Selfcheck { seeds, inject_fault } => {
            let fault = inject_fault.map(|InjectedFault::NavWidth| Fault::NavWidth);
            match check::run(seeds, fault) {
                Ok(count) => {
                    println!("selfcheck: {count} instances over {} invariants passed", check::INVARIANTS.len());
                    Ok(())
                }
                Err(f) => Err(Failure::Invariant(f.into())),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("invariant failure: {e:#}");
            ExitCode::from(2)
        }
    }
}
