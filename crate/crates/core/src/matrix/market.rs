//! Matrix Market coordinate files (real, general or symmetric) and plain
//! text vector files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Csr, Matrix, SYMMETRY_TOL};
use crate::error::{Error, Result};

/// Read a coordinate-format Matrix Market file into a general-sparse matrix.
/// Symmetric files are expanded to full storage and keep the symmetry flag;
/// general files are probed for symmetry at a relative tolerance of 1e-12.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<Matrix> {
    let file = File::open(path.as_ref())?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))??;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() < 5 || !tokens[0].starts_with("%%matrixmarket") {
        return Err(Error::Parse("missing MatrixMarket header".into()));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(Error::Parse(format!(
            "unsupported kind: {} {}",
            tokens[1], tokens[2]
        )));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::Parse(format!("unsupported field: {}", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::Parse(format!("unsupported symmetry: {other}"))),
    };

    let mut size_line: Option<String> = None;
    for line in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some(trimmed.to_string());
        break;
    }
    let size_line = size_line.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size token `{t}`"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 {
        return Err(Error::Parse("size line must be `rows cols nnz`".into()));
    }
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows != cols {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be square, got {rows}x{cols}"
        )));
    }

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(nnz);
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line `{trimmed}`")))?;
        let j: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line `{trimmed}`")))?;
        let v: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad entry line `{trimmed}`")))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::Parse(format!("index out of range in `{trimmed}`")));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }
    if !symmetric && triplets.len() != nnz {
        return Err(Error::Parse(format!(
            "expected {nnz} entries, found {}",
            triplets.len()
        )));
    }

    let csr = Csr::from_triplets(rows, &triplets)?;
    let m = Matrix::from_csr(csr, symmetric);
    if symmetric {
        Ok(m)
    } else {
        let mut m = m;
        let flag = m.check_symmetric(Some(SYMMETRY_TOL));
        m.set_symmetric_hint(flag);
        Ok(m)
    }
}

/// Write a matrix in coordinate format. Matrices whose symmetry flag is set
/// (and verified) are written as `symmetric` with the lower triangle only.
pub fn write_matrix_market(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let symmetric = m.symmetric_hint() && m.check_symmetric(Some(SYMMETRY_TOL));
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    m.for_each_entry(|i, j, v| {
        if v != 0.0 && (!symmetric || j <= i) {
            entries.push((i, j, v));
        }
    });

    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "%%MatrixMarket matrix coordinate real {}",
        if symmetric { "symmetric" } else { "general" }
    )?;
    writeln!(out, "{} {} {}", m.n(), m.n(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
    }
    out.flush()?;
    Ok(())
}

/// Read a plain-text vector: one value per line, `%` comments and blank
/// lines skipped.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let file = File::open(path.as_ref())?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| Error::Parse(format!("bad vector entry `{trimmed}`")))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse("vector file holds no values".into()));
    }
    Ok(out)
}

pub fn write_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    for x in v {
        writeln!(out, "{x}")?;
    }
    out.flush()?;
    Ok(())
}
