//! Line-oriented file helpers shared by the loaders.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Yields `(1-based line number, line)` pairs.
pub(crate) fn read_lines<'a>(
    reader: impl BufRead + 'a,
    origin: &'a str,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader.lines().enumerate().map(move |(i, line)| {
        line.map(|l| (i + 1, l))
            .map_err(|e| Error::parse(origin, i + 1, format!("read failed: {e}")))
    })
}

/// Yields the non-blank, non-comment lines of a tab-separated file.
pub(crate) fn data_lines<'a>(
    reader: impl BufRead + 'a,
    origin: &'a str,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    read_lines(reader, origin).filter(|r| match r {
        Ok((_, l)) => !(l.trim().is_empty() || l.starts_with('#')),
        Err(_) => true,
    })
}
