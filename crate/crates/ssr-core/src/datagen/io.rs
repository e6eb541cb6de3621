//! Flat-file example ingestion and emission.
//!
//! Two formats: dense CSV with the exact header `y,x0,x1,...,x{d-1}`, and
//! sparse text with one `label idx:val idx:val ...` example per line,
//! 0-based indices. Parse errors carry 1-based line numbers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SsrError};
use crate::loss::Example;

use super::stream::{substream, ROLE_SHUFFLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    DenseCsv,
    SparseText,
}

fn open_err(path: &Path, e: std::io::Error) -> SsrError {
    SsrError::InvalidInput(format!("{}: {e}", path.display()))
}

fn parse_f64(token: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = token.trim().parse().map_err(|_| {
        SsrError::InvalidInput(format!("line {line}: {what} `{}` is not a number", token.trim()))
    })?;
    if !v.is_finite() {
        return Err(SsrError::InvalidInput(format!(
            "line {line}: {what} `{v}` is not finite"
        )));
    }
    Ok(v)
}

pub fn write_dense_csv(path: &Path, d: usize, examples: &[Example]) -> Result<()> {
    let file = File::create(path).map_err(|e| open_err(path, e))?;
    let mut out = BufWriter::new(file);
    let mut header = String::from("y");
    for i in 0..d {
        header.push_str(&format!(",x{i}"));
    }
    let write = |out: &mut BufWriter<File>, s: &str| -> Result<()> {
        out.write_all(s.as_bytes()).map_err(|e| open_err(path, e))
    };
    write(&mut out, &header)?;
    write(&mut out, "\n")?;
    for (idx, e) in examples.iter().enumerate() {
        if e.dim() != d {
            return Err(SsrError::InvalidInput(format!(
                "example {idx} has d={}, expected {d}",
                e.dim()
            )));
        }
        let mut row = format!("{}", e.y);
        for v in &e.x {
            row.push_str(&format!(",{v}"));
        }
        row.push('\n');
        write(&mut out, &row)?;
    }
    out.flush().map_err(|e| open_err(path, e))
}

/// Read a dense CSV; the dimension comes from the header. An empty file is an
/// empty stream.
pub fn read_dense_csv(path: &Path) -> Result<(usize, Vec<Example>)> {
    let file = File::open(path).map_err(|e| open_err(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let header = match lines.next() {
        None => return Ok((0, Vec::new())),
        Some((_, l)) => l.map_err(|e| open_err(path, e))?,
    };
    let fields: Vec<&str> = header.split(',').collect();
    if fields[0].trim() != "y" {
        return Err(SsrError::InvalidInput(format!(
            "line 1: header must start with `y`, got `{}`",
            fields[0]
        )));
    }
    let d = fields.len() - 1;
    for (i, f) in fields[1..].iter().enumerate() {
        if f.trim() != format!("x{i}") {
            return Err(SsrError::InvalidInput(format!(
                "line 1: header column {} must be `x{i}`, got `{f}`",
                i + 1
            )));
        }
    }
    let mut examples = Vec::new();
    for (zero_idx, line) in lines {
        let n = zero_idx + 1;
        let line = line.map_err(|e| open_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(SsrError::InvalidInput(format!(
                "line {n}: expected {} fields, got {}",
                d + 1,
                fields.len()
            )));
        }
        let y = parse_f64(fields[0], n, "label")?;
        let mut x = Vec::with_capacity(d);
        for f in &fields[1..] {
            x.push(parse_f64(f, n, "feature")?);
        }
        examples.push(Example::new(x, y)?);
    }
    Ok((d, examples))
}

pub fn write_sparse_text(path: &Path, examples: &[Example]) -> Result<()> {
    let file = File::create(path).map_err(|e| open_err(path, e))?;
    let mut out = BufWriter::new(file);
    for e in examples {
        let mut row = format!("{}", e.y);
        for (i, v) in e.x.iter().enumerate() {
            if *v != 0.0 {
                row.push_str(&format!(" {i}:{v}"));
            }
        }
        row.push('\n');
        out.write_all(row.as_bytes()).map_err(|e| open_err(path, e))?;
    }
    out.flush().map_err(|e| open_err(path, e))
}

/// Read sparse text. With `d: None` the dimension is inferred as one past the
/// largest index seen; with `Some(d)` out-of-range indices are errors.
pub fn read_sparse_text(path: &Path, d: Option<usize>) -> Result<(usize, Vec<Example>)> {
    let file = File::open(path).map_err(|e| open_err(path, e))?;
    let mut rows: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut max_idx: Option<usize> = None;
    for (zero_idx, line) in BufReader::new(file).lines().enumerate() {
        let n = zero_idx + 1;
        let line = line.map_err(|e| open_err(path, e))?;
        let mut tokens = line.split_whitespace();
        let label = match tokens.next() {
            None => continue,
            Some(t) => parse_f64(t, n, "label")?,
        };
        let mut pairs: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| {
                SsrError::InvalidInput(format!("line {n}: token `{tok}` is not idx:val"))
            })?;
            let idx: usize = idx_s.parse().map_err(|_| {
                SsrError::InvalidInput(format!("line {n}: index `{idx_s}` is not an integer"))
            })?;
            if let Some(dd) = d {
                if idx >= dd {
                    return Err(SsrError::InvalidInput(format!(
                        "line {n}: index {idx} out of range for d={dd}"
                    )));
                }
            }
            if pairs.iter().any(|&(i, _)| i == idx) {
                return Err(SsrError::InvalidInput(format!(
                    "line {n}: duplicate index {idx}"
                )));
            }
            pairs.push((idx, parse_f64(val_s, n, "value")?));
            max_idx = Some(max_idx.map_or(idx, |m| m.max(idx)));
        }
        rows.push((label, pairs));
    }
    let dim = d.unwrap_or_else(|| max_idx.map_or(0, |m| m + 1));
    let mut examples = Vec::with_capacity(rows.len());
    for (label, pairs) in rows {
        let mut x = vec![0.0; dim];
        for (i, v) in pairs {
            x[i] = v;
        }
        examples.push(Example::new(x, label)?);
    }
    Ok((dim, examples))
}

/// Seeded in-memory permutation for small ingested files.
pub fn shuffle_examples(examples: &mut [Example], seed: u64) {
    let mut rng = substream(seed, 0, ROLE_SHUFFLE);
    examples.shuffle(&mut rng);
}
