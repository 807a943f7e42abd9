//! Plain-text matrix files.
//!
//! Line 1 holds `rows cols` as base-10 integers; the rest of the file is
//! rows×cols complex entries in row-major order, each written as two decimal
//! tokens `re im`. Any whitespace (including newlines) may separate tokens.
//! Values are written with 17 significant digits so binary64 round-trips
//! exactly.

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Complex};
use std::fs;
use std::path::Path;

/// Render a matrix in the text format.
pub fn matrix_to_text(a: &CMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", a.rows(), a.cols()));
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a[(i, j)];
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{:.16e} {:.16e}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

/// Parse the text format produced by [`matrix_to_text`].
pub fn matrix_from_text(text: &str) -> Result<CMatrix> {
    let mut tokens = text.split_whitespace();
    let rows: usize = tokens
        .next()
        .ok_or_else(|| Error::MatrixFormat("missing header".into()))?
        .parse()
        .map_err(|_| Error::MatrixFormat("header row count is not an integer".into()))?;
    let cols: usize = tokens
        .next()
        .ok_or_else(|| Error::MatrixFormat("header column count missing".into()))?
        .parse()
        .map_err(|_| Error::MatrixFormat("header column count is not an integer".into()))?;
    if rows == 0 || cols == 0 {
        return Err(Error::MatrixFormat("dimensions must be positive".into()));
    }
    let want = rows * cols * 2;
    let mut values = Vec::with_capacity(want);
    for tok in tokens.by_ref().take(want) {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::MatrixFormat(format!("bad numeric token {tok:?}")))?;
        if !v.is_finite() {
            return Err(Error::MatrixFormat(format!("non-finite value {tok:?}")));
        }
        values.push(v);
    }
    if values.len() != want {
        return Err(Error::MatrixFormat(format!(
            "expected {want} numeric tokens, found {}",
            values.len()
        )));
    }
    if tokens.next().is_some() {
        return Err(Error::MatrixFormat("trailing tokens after matrix data".into()));
    }
    let entries = values
        .chunks_exact(2)
        .map(|p| Complex::new(p[0], p[1]))
        .collect();
    CMatrix::new(rows, cols, entries)
}

pub fn write_matrix(a: &CMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, matrix_to_text(a))?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    let text = fs::read_to_string(path)?;
    matrix_from_text(&text)
}
