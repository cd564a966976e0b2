//! Value and point files: UTF-8 decimal text or little-endian 8-byte words.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use adjpile::Point;
use anyhow::{bail, Context, Result};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Binary,
}

fn words(bytes: &[u8], per_item: usize, path: &Path) -> Result<Vec<[u8; 8]>> {
    if !bytes.len().is_multiple_of(8 * per_item) {
        bail!("{}: {} bytes is not a whole number of {}-byte records", path.display(), bytes.len(), 8 * per_item);
    }
    Ok(bytes.chunks_exact(8).map(|c| c.try_into().expect("chunks of eight")).collect())
}

fn lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().enumerate().map(|(i, l)| (i + 1, l.trim().to_owned())).filter(|(_, l)| !l.is_empty()).collect())
}

pub fn read_values(path: &Path, format: Format) -> Result<Vec<u64>> {
    match format {
        Format::Binary => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(words(&bytes, 1, path)?.into_iter().map(u64::from_le_bytes).collect())
        }
        Format::Text => lines(path)?
            .into_iter()
            .map(|(no, l)| {
                l.parse().with_context(|| format!("{}:{no}: {l:?} is not an unsigned integer", path.display()))
            })
            .collect(),
    }
}

pub fn read_points(path: &Path, format: Format) -> Result<Vec<Point>> {
    match format {
        Format::Binary => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let w = words(&bytes, 2, path)?;
            Ok(w.chunks_exact(2).map(|p| Point::new(i64::from_le_bytes(p[0]), i64::from_le_bytes(p[1]))).collect())
        }
        Format::Text => lines(path)?
            .into_iter()
            .map(|(no, l)| {
                let mut it = l.split_whitespace().map(str::parse::<i64>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(x)), Some(Ok(y)), None) => Ok(Point::new(x, y)),
                    _ => bail!("{}:{no}: {l:?} is not an \"x y\" integer pair", path.display()),
                }
            })
            .collect(),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_values(path: Option<&Path>, format: Format, values: &[u64]) -> Result<()> {
    let mut out = sink(path)?;
    for v in values {
        match format {
            Format::Text => writeln!(out, "{v}")?,
            Format::Binary => out.write_all(&v.to_le_bytes())?,
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_points(path: Option<&Path>, format: Format, points: &[Point]) -> Result<()> {
    let mut out = sink(path)?;
    for p in points {
        match format {
            Format::Text => writeln!(out, "{} {}", p.x, p.y)?,
            Format::Binary => {
                out.write_all(&p.x.to_le_bytes())?;
                out.write_all(&p.y.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
