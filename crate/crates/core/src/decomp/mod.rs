//! Panel-blocked factorizations with deferred trailing updates.
//!
//! All three algorithms sweep columns `c = 1..=n` (1-based, inclusive) while
//! tracking `z`, the first column of the current panel. Columns inside the
//! panel are completed from columns `z..c-1` only. When `c == z + s` the
//! contribution of the whole panel is subtracted from the trailing block in
//! one rectangular product (a *flush*) and `z` moves to `c`. The last panel
//! is never flushed; its contribution enters through the inner loops.
//!
//! With `s = n` no flush ever fires and the column loops are the unblocked
//! Crout / Gram-Schmidt algorithms. With `s = 1` every column is flushed
//! immediately, giving the right-looking (outer-product) algorithms.

mod cholesky;
mod lu;
mod qr;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matmul::OpCount;
use crate::matrix::Matrix;

pub use cholesky::{blocked_cholesky, blocked_cholesky_with};
pub use lu::{blocked_lu, blocked_lu_with};
pub use qr::{blocked_qr, blocked_qr_with};

/// Sweep position, 1-based: `z` starts the current panel, `c` is the column
/// being completed. `z <= c <= n + 1` and `c - z < s` between flushes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PanelState {
    pub z: usize,
    pub c: usize,
}

/// Chooses the width of each panel as the sweep reaches it.
///
/// `width` is consulted once at the start and again after every flush,
/// with `state.z == state.c` equal to the first column of the new panel.
pub trait PanelSchedule {
    fn width(&self, n: usize, state: PanelState) -> usize;
}

/// Constant panel width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedWidth(pub usize);

impl PanelSchedule for FixedWidth {
    fn width(&self, _n: usize, _state: PanelState) -> usize {
        self.0
    }
}

impl<F: Fn(usize, PanelState) -> usize> PanelSchedule for F {
    fn width(&self, n: usize, state: PanelState) -> usize {
        self(n, state)
    }
}

/// Instrumentation gathered during one factorization. On error it holds the
/// counts accumulated up to the failing column.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompStats {
    pub flushes: usize,
    /// Column `c` (1-based) at which each flush fired.
    pub flush_at: Vec<usize>,
    /// Column-loop arithmetic (divisions and square roots excluded).
    pub panel: OpCount,
    /// Flush products plus the trailing-block subtractions.
    pub flush: OpCount,
    /// Work after the sweep: the `R = Qᵀ A` product for QR.
    pub finish: OpCount,
    /// Frobenius norm of the strict lower triangle of `Qᵀ A` before it was
    /// zeroed (QR only).
    pub discarded_lower_mass: f64,
}

impl DecompStats {
    pub fn total(&self) -> OpCount {
        self.panel + self.flush + self.finish
    }
}

/// Panel cursor shared by the three sweeps.
struct Sweep<'a> {
    n: usize,
    z: usize,
    s: usize,
    schedule: &'a dyn PanelSchedule,
}

impl<'a> Sweep<'a> {
    fn new(n: usize, schedule: &'a dyn PanelSchedule) -> Result<Self> {
        let mut sweep = Sweep {
            n,
            z: 1,
            s: 0,
            schedule,
        };
        sweep.s = sweep.next_width()?;
        Ok(sweep)
    }

    fn next_width(&self) -> Result<usize> {
        let s = self.schedule.width(
            self.n,
            PanelState {
                z: self.z,
                c: self.z,
            },
        );
        if s == 0 {
            return Err(Error::InvalidPanelWidth { s, n: self.n });
        }
        Ok(s.min(self.n))
    }

    /// True when the panel ending before `c` must be flushed.
    fn due(&self, c: usize) -> bool {
        c == self.z + self.s
    }

    fn advance(&mut self, c: usize, stats: &mut DecompStats) -> Result<()> {
        stats.flushes += 1;
        stats.flush_at.push(c);
        self.z = c;
        self.s = self.next_width()?;
        Ok(())
    }
}

/// `acc[r] -= m[rows.start + r][cols] · x`, subtracting term by term in
/// ascending column order. Rows are carried in groups so their independent
/// chains overlap; each entry's operation order is unchanged.
fn subtract_dots(m: &Matrix, rows: Range<usize>, cols: Range<usize>, x: &[f64], acc: &mut [f64]) {
    assert_eq!(acc.len(), rows.len());
    assert_eq!(x.len(), cols.len());
    let mut i = rows.start;
    let mut groups = acc.chunks_exact_mut(ROWS);
    for g in &mut groups {
        dots::<ROWS>(m, i, &cols, x, g);
        i += ROWS;
    }
    for v in groups.into_remainder().chunks_mut(1) {
        dots::<1>(m, i, &cols, x, v);
        i += 1;
    }
}

const ROWS: usize = 8;

#[inline(always)]
fn dots<const R: usize>(m: &Matrix, i: usize, cols: &Range<usize>, x: &[f64], acc: &mut [f64]) {
    let n = x.len();
    let r: [&[f64]; R] = std::array::from_fn(|q| &m.row(i + q)[cols.start..cols.start + n]);
    let mut v: [f64; R] = std::array::from_fn(|q| acc[q]);
    for k in 0..n {
        let xk = x[k];
        for q in 0..R {
            v[q] -= r[q][k] * xk;
        }
    }
    acc[..R].copy_from_slice(&v);
}

pub(crate) fn check_width(s: usize, n: usize) -> Result<()> {
    if s == 0 || s > n {
        Err(Error::InvalidPanelWidth { s, n })
    } else {
        Ok(())
    }
}
