//! Small shared helpers: fraction arithmetic and file access.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

// Products such as 0.1 * 30 land on 3.0000000000000004 in binary floating
// point; counts are snapped to the nearest integer when within this slack.
const COUNT_SLACK: f64 = 1e-9;

/// `⌈fraction · n⌉`, robust to binary rounding of the product.
pub fn ceil_count(fraction: f64, n: usize) -> usize {
    let x = fraction * n as f64;
    let rounded = x.round();
    let c = if (x - rounded).abs() < COUNT_SLACK {
        rounded
    } else {
        x.ceil()
    };
    (c.max(0.0) as usize).min(n)
}

/// `⌊fraction · n⌋`, robust to binary rounding of the product.
pub fn floor_count(fraction: f64, n: usize) -> usize {
    let x = fraction * n as f64;
    let rounded = x.round();
    let c = if (x - rounded).abs() < COUNT_SLACK {
        rounded
    } else {
        x.floor()
    };
    (c.max(0.0) as usize).min(n)
}

/// Checks `0 < fraction <= 1`.
pub fn check_fraction(name: &str, fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must lie in (0, 1], got {fraction}"
        )))
    }
}

pub fn open_reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Iterates over the lines of a reader with 1-based line numbers.
pub fn numbered_lines<'a, R: BufRead + 'a>(
    reader: R,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader
        .lines()
        .enumerate()
        .map(move |(i, line)| line.map(|l| (i + 1, l)).map_err(|e| Error::io(path, e)))
}

/// Reads a JSON-lines file, skipping blank lines.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = open_reader(path)?;
    let mut out = Vec::new();
    for item in numbered_lines(reader, path) {
        let (lineno, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path.display().to_string(), lineno, e.to_string()))?;
        out.push(value);
    }
    Ok(out)
}

/// Writes records as JSON lines.
pub fn write_jsonl<T: serde::Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = create_writer(path)?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
