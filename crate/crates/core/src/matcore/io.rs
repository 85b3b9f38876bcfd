//! Plain-text matrix format: a header line (`d` for symmetric matrices,
//! `rows cols` for rectangular ones) followed by one whitespace-separated row
//! per line.

use std::fmt::Write;

use nalgebra::DMatrix;

use super::{RectMatrix, SymMatrix};
use crate::error::{Error, Result};

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a positive integer, found `{tok}`")))
}

fn read_body(lines: &mut dyn Iterator<Item = (usize, &str)>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {rows} rows, found {r}")))?;
        let vals: Vec<&str> = l.split_whitespace().collect();
        if vals.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} values, found {}", vals.len())));
        }
        for (c, tok) in vals.iter().enumerate() {
            m[(r, c)] = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("invalid number `{tok}`")))?;
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing data after matrix body"));
    }
    Ok(m)
}

pub fn read_sym_matrix(text: &str) -> Result<SymMatrix> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let d = match toks.as_slice() {
        [d] => parse_usize(ln, d)?,
        [r, c] if r == c => parse_usize(ln, r)?,
        _ => return Err(parse_err(ln, "header must be a single dimension `d`")),
    };
    if d == 0 {
        return Err(parse_err(ln, "dimension must be positive"));
    }
    SymMatrix::from_dmatrix(read_body(&mut lines, d, d)?)
}

pub fn read_rect_matrix(text: &str) -> Result<RectMatrix> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match toks.as_slice() {
        [d] => {
            let d = parse_usize(ln, d)?;
            (d, d)
        }
        [r, c] => (parse_usize(ln, r)?, parse_usize(ln, c)?),
        _ => return Err(parse_err(ln, "header must be `rows cols`")),
    };
    if rows == 0 || cols == 0 {
        return Err(parse_err(ln, "shape must be positive"));
    }
    RectMatrix::new(read_body(&mut lines, rows, cols)?)
}

fn write_body(out: &mut String, m: &DMatrix<f64>) {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{}", m[(r, c)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

pub fn write_sym_matrix(a: &SymMatrix) -> String {
    let mut out = format!("{}\n", a.dim());
    write_body(&mut out, a.as_dmatrix());
    out
}

pub fn write_rect_matrix(b: &RectMatrix) -> String {
    let mut out = format!("{} {}\n", b.rows(), b.cols());
    write_body(&mut out, b.as_dmatrix());
    out
}
