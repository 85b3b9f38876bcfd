use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Parses one sample per line, fields separated by commas, semicolons, tabs
/// or spaces. Blank lines and `#` comments are skipped.
pub fn read_samples(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        reason: format!("invalid number `{t}`"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != vals.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: format!("expected {} fields, found {}", first.len(), vals.len()),
                });
            }
        }
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            reason: "no samples".into(),
        });
    }
    let d = rows[0].len();
    Ok(DMatrix::from_row_iterator(rows.len(), d, rows.into_iter().flatten()))
}
