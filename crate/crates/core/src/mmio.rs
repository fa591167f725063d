//! Matrix Market dense `array real general` files.
//!
//! Values are stored column-major, one per line, written with 17 significant
//! digits so that a write/read cycle reproduces every `f64` bit-for-bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const HEADER: &str = "%%MatrixMarket matrix array real general";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        e => e,
    })
}

pub fn parse_matrix<R: Read>(reader: BufReader<R>) -> Result<Matrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let io = |source| Error::Io {
        path: Default::default(),
        source,
    };

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header.map_err(io)?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(
            1,
            format!("not a Matrix Market header: {header:?}"),
        ));
    }
    if fields[2] != "array" || fields[3] != "real" || fields[4] != "general" {
        return Err(parse_err(
            1,
            format!(
                "unsupported format {} {} {}",
                fields[2], fields[3], fields[4]
            ),
        ));
    }

    let mut shape = None;
    let mut values = Vec::new();
    let mut expected = 0usize;
    for (no, line) in lines {
        let line = line.map_err(io)?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        match shape {
            None => {
                let dims: Vec<&str> = t.split_whitespace().collect();
                if dims.len() != 2 {
                    return Err(parse_err(no, "expected `rows cols`"));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(no, format!("bad dimension {s:?}")))
                };
                let (r, c) = (parse(dims[0])?, parse(dims[1])?);
                if r == 0 || c == 0 {
                    return Err(parse_err(no, format!("invalid dimensions {r}x{c}")));
                }
                expected = r
                    .checked_mul(c)
                    .ok_or_else(|| parse_err(no, "dimensions overflow"))?;
                values.reserve(expected.min(1 << 24));
                shape = Some((r, c));
            }
            Some(_) => {
                for tok in t.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| parse_err(no, format!("bad value {tok:?}")))?;
                    if !v.is_finite() {
                        return Err(parse_err(no, format!("non-finite value {tok:?}")));
                    }
                    if values.len() == expected {
                        return Err(parse_err(no, format!("more than {expected} entries")));
                    }
                    values.push(v);
                }
            }
        }
    }

    let (rows, cols) = shape.ok_or_else(|| parse_err(1, "missing size line"))?;
    if values.len() != expected {
        return Err(parse_err(
            0,
            format!("declared {expected} entries, found {}", values.len()),
        ));
    }
    let mut m = Matrix::zeros(rows, cols)?;
    for (k, v) in values.into_iter().enumerate() {
        m[(k % rows, k / rows)] = v;
    }
    Ok(m)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    format_matrix(&mut w, m).map_err(io)?;
    w.flush().map_err(io)
}

pub fn format_matrix<W: Write>(w: &mut W, m: &Matrix) -> std::io::Result<()> {
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{:.16e}", m[(i, j)])?;
        }
    }
    Ok(())
}
