use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions {rows}x{cols}")]
    InvalidDimensions { rows: usize, cols: usize },

    #[error("{op}: shape mismatch {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("region rows {}..={} cols {}..={} outside a {}x{} matrix", .region.0, .region.1, .region.2, .region.3, .shape.0, .shape.1)]
    RegionOutOfBounds {
        region: (usize, usize, usize, usize),
        shape: (usize, usize),
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("panel width {s} outside 1..={n}")]
    InvalidPanelWidth { s: usize, n: usize },

    /// The value under the square root at `column` (1-based) was not positive.
    #[error("not positive-definite at column {column}")]
    NotPositiveDefinite { column: usize },

    /// `|L_cc|` at `column` (1-based) fell below the pivot tolerance.
    #[error("singular leading minor at column {column}")]
    SingularLeadingMinor { column: usize },

    /// The projected column norm at `column` (1-based) fell below tolerance.
    #[error("rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for the failures caused by the input violating a factorization
    /// precondition (as opposed to usage or I/O problems).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::SingularLeadingMinor { .. }
                | Error::RankDeficient { .. }
        )
    }

    /// 1-based failing column for numerical failures.
    pub fn column(&self) -> Option<usize> {
        match *self {
            Error::NotPositiveDefinite { column }
            | Error::SingularLeadingMinor { column }
            | Error::RankDeficient { column } => Some(column),
            _ => None,
        }
    }
}
