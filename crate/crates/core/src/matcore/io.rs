//! Plain-text matrix format.
//!
//! ```text
//! # comment lines start with '#'
//! 3
//! 2.8125 -1.125 0.625
//! -1.125 0.5 -0.25
//! 0.625 -0.25 0.25
//! ```
//!
//! The first non-comment line is the dimension, followed by one line per row.

use std::path::Path;

use super::{Mat, SymMatrix};
use crate::error::{Error, Result};
use crate::report::fmt_f64;

pub fn parse_matrix(text: &str) -> Result<SymMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or(Error::Format {
        line: 0,
        message: "missing dimension line".into(),
    })?;
    let dim: usize = header.parse().map_err(|_| Error::Format {
        line,
        message: format!("invalid dimension `{header}`"),
    })?;
    if dim == 0 {
        return Err(Error::Format {
            line,
            message: "dimension must be at least 1".into(),
        });
    }

    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let (line, text) = lines.next().ok_or(Error::Format {
            line: 0,
            message: format!("expected {dim} rows, found {row}"),
        })?;
        let values = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Format {
                    line,
                    message: format!("invalid number `{tok}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != dim {
            return Err(Error::Format {
                line,
                message: format!("expected {dim} entries, found {}", values.len()),
            });
        }
        data.extend(values);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Format {
            line,
            message: "trailing data after matrix".into(),
        });
    }
    SymMatrix::new(Mat::from_row_major(dim, dim, data)?)
}

pub fn format_matrix(a: &SymMatrix) -> String {
    let n = a.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_f64(a.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SymMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, a: &SymMatrix) -> Result<()> {
    std::fs::write(path, format_matrix(a))?;
    Ok(())
}
