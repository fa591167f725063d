//! Multiplication backends with scalar-operation instrumentation.
//!
//! Every product takes an [`OpCount`] accumulator. Classical products of an
//! `m x k` by `k x p` pair tally `m*k*p` multiplications and `m*p*(k-1)`
//! additions. Strassen levels add `18 h^2` additions for half-size `h`.
//! Copies, transposes and zero padding are not tallied, but arithmetic on
//! padded zeros is.

mod kernel;
mod strassen;

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use strassen::mul_strassen_square;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MulBackend {
    Classical,
    /// Up to `depth` levels of the 7-product scheme. Recursion also stops
    /// before a level whose half-size would drop below `min_leaf`.
    Strassen {
        depth: u32,
        min_leaf: usize,
    },
}

impl MulBackend {
    pub fn strassen(depth: u32) -> Self {
        MulBackend::Strassen { depth, min_leaf: 1 }
    }

    /// Recursion levels actually used for an `n x n` square product.
    pub fn effective_depth(&self, n: usize) -> u32 {
        match *self {
            MulBackend::Classical => 0,
            MulBackend::Strassen { depth, min_leaf } => {
                let mut d = 0;
                while d < depth && n.div_ceil(1 << (d + 1)) >= min_leaf.max(1) {
                    d += 1;
                }
                d
            }
        }
    }

    pub fn depth(&self) -> u32 {
        match *self {
            MulBackend::Classical => 0,
            MulBackend::Strassen { depth, .. } => depth,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MulBackend::Classical => "classical",
            MulBackend::Strassen { .. } => "strassen",
        }
    }

    /// Square product under this backend.
    pub fn mul_square(&self, a: &Matrix, b: &Matrix, ops: &mut OpCount) -> Result<Matrix> {
        match *self {
            MulBackend::Classical => mul_classical(a, b, ops),
            MulBackend::Strassen { .. } => {
                let d = self.effective_depth(a.rows());
                mul_strassen_square(a, b, d, ops)
            }
        }
    }
}

impl fmt::Display for MulBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MulBackend::Classical => write!(f, "classical"),
            MulBackend::Strassen { depth, .. } => write!(f, "strassen:{depth}"),
        }
    }
}

impl FromStr for MulBackend {
    type Err = String;

    /// `classical`, `strassen` (depth 1) or `strassen:<depth>`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.split_once(':') {
            None if s == "classical" => Ok(MulBackend::Classical),
            None if s == "strassen" => Ok(MulBackend::strassen(1)),
            Some(("strassen", d)) => d
                .parse()
                .map(MulBackend::strassen)
                .map_err(|_| format!("bad strassen depth {d:?}")),
            _ => Err(format!("unknown backend {s:?}")),
        }
    }
}

/// Scalar operation tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
    /// Backend block products issued by [`mul_rect`].
    pub block_products: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.mults + self.adds
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, o: OpCount) -> OpCount {
        OpCount {
            mults: self.mults + o.mults,
            adds: self.adds + o.adds,
            block_products: self.block_products + o.block_products,
        }
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, o: OpCount) {
        *self = *self + o;
    }
}

fn inner_mismatch(op: &'static str, a: &Matrix, b: &Matrix) -> Error {
    Error::ShapeMismatch {
        op,
        left: a.shape(),
        right: b.shape(),
    }
}

/// Triple-loop product, each entry summed over ascending `k`.
pub fn mul_classical(a: &Matrix, b: &Matrix, ops: &mut OpCount) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(inner_mismatch("mul_classical", a, b));
    }
    let (m, k, p) = (a.rows(), a.cols(), b.cols());
    let mut c = Matrix::zeros(m, p)?;
    kernel::gemm(c.as_mut_slice(), a.as_slice(), b.as_slice(), m, k, p, ops);
    Ok(c)
}

/// Copies the `t x t` block at block coordinates `(bi, bj)`, zero padded.
fn block(src: &Matrix, bi: usize, bj: usize, t: usize) -> Vec<f64> {
    let mut out = vec![0.0; t * t];
    let r0 = bi * t;
    let c0 = bj * t;
    let h = t.min(src.rows() - r0);
    let w = t.min(src.cols() - c0);
    for i in 0..h {
        out[i * t..i * t + w].copy_from_slice(&src.row(r0 + i)[c0..c0 + w]);
    }
    out
}

fn block_product(
    x: &[f64],
    y: &[f64],
    t: usize,
    backend: MulBackend,
    ops: &mut OpCount,
) -> Vec<f64> {
    ops.block_products += 1;
    match backend {
        MulBackend::Classical => {
            let mut c = vec![0.0; t * t];
            kernel::gemm(&mut c, x, y, t, t, t, ops);
            c
        }
        MulBackend::Strassen { .. } => {
            strassen::square_padded(x, y, t, backend.effective_depth(t), ops)
        }
    }
}

/// Rectangular product over a grid of `tile x tile` squares.
///
/// Ragged edge blocks are zero padded to full tiles. Each of the
/// `ceil(m/t) * ceil(k/t) * ceil(p/t)` block products goes through `backend`;
/// partial products along the inner dimension are summed classically.
pub fn mul_rect(
    a: &Matrix,
    b: &Matrix,
    backend: MulBackend,
    tile: usize,
    ops: &mut OpCount,
) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(inner_mismatch("mul_rect", a, b));
    }
    if tile == 0 {
        return Err(Error::InvalidDimensions { rows: 0, cols: 0 });
    }
    let t = tile;
    let (m, k, p) = (a.rows(), a.cols(), b.cols());
    let (mb, kb, pb) = (m.div_ceil(t), k.div_ceil(t), p.div_ceil(t));

    let a_blocks: Vec<Vec<f64>> = (0..mb)
        .flat_map(|i| (0..kb).map(move |kk| (i, kk)))
        .map(|(i, kk)| block(a, i, kk, t))
        .collect();
    let b_blocks: Vec<Vec<f64>> = (0..kb)
        .flat_map(|kk| (0..pb).map(move |j| (kk, j)))
        .map(|(kk, j)| block(b, kk, j, t))
        .collect();

    let mut c = Matrix::zeros(m, p)?;
    for bi in 0..mb {
        for bj in 0..pb {
            let mut acc = block_product(&a_blocks[bi * kb], &b_blocks[bj], t, backend, ops);
            for kk in 1..kb {
                let part = block_product(
                    &a_blocks[bi * kb + kk],
                    &b_blocks[kk * pb + bj],
                    t,
                    backend,
                    ops,
                );
                acc.iter_mut().zip(&part).for_each(|(x, y)| *x += y);
                ops.adds += (t * t) as u64;
            }
            let h = t.min(m - bi * t);
            let w = t.min(p - bj * t);
            for i in 0..h {
                c.row_mut(bi * t + i)[bj * t..bj * t + w].copy_from_slice(&acc[i * t..i * t + w]);
            }
        }
    }
    Ok(c)
}

/// `aᵀ · b` through an explicit transpose and [`mul_rect`].
pub fn mul_at_b(
    a: &Matrix,
    b: &Matrix,
    backend: MulBackend,
    tile: usize,
    ops: &mut OpCount,
) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(inner_mismatch("mul_at_b", a, b));
    }
    mul_rect(&a.transpose(), b, backend, tile, ops)
}

/// `a · bᵀ` through an explicit transpose and [`mul_rect`].
pub fn mul_a_bt(
    a: &Matrix,
    b: &Matrix,
    backend: MulBackend,
    tile: usize,
    ops: &mut OpCount,
) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(inner_mismatch("mul_a_bt", a, b));
    }
    mul_rect(a, &b.transpose(), backend, tile, ops)
}
