//! Depth-limited Strassen for square operands.
//!
//! Operands are zero padded once, up front, to the next multiple of
//! `2^depth`; every level then splits evenly. Leaves use the classical
//! kernel. The 7-product / 18-addition variant is used, with each product
//! folded into the output quadrants as soon as it is formed:
//!
//! ```text
//! M1 = (A11 + A22)(B11 + B22)    C11 = M1 + M4 - M5 + M7
//! M2 = (A21 + A22) B11           C12 = M3 + M5
//! M3 = A11 (B12 - B22)           C21 = M2 + M4
//! M4 = A22 (B21 - B11)           C22 = M1 - M2 + M3 + M6
//! M5 = (A11 + A12) B22
//! M6 = (A21 - A11)(B11 + B12)
//! M7 = (A12 - A22)(B21 + B22)
//! ```

use super::kernel::{gemm_strided, View};
use super::OpCount;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn mul_strassen_square(
    a: &Matrix,
    b: &Matrix,
    depth: u32,
    ops: &mut OpCount,
) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "mul_strassen_square",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            op: "mul_strassen_square",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let n = a.rows();
    let c = square_padded(a.as_slice(), b.as_slice(), n, depth, ops);
    Matrix::from_vec(n, n, c)
}

/// `n x n` product of row-major buffers, padding internally as needed.
pub(super) fn square_padded(
    a: &[f64],
    b: &[f64],
    n: usize,
    depth: u32,
    ops: &mut OpCount,
) -> Vec<f64> {
    let unit = 1usize << depth;
    let np = n.div_ceil(unit) * unit;
    let mut c = vec![0.0; np * np];
    if np == n {
        recurse(View::new(a, n), View::new(b, n), n, depth, &mut c, ops);
        return c;
    }
    let pad = |src: &[f64]| {
        let mut out = vec![0.0; np * np];
        for (i, row) in src.chunks_exact(n).enumerate() {
            out[i * np..i * np + n].copy_from_slice(row);
        }
        out
    };
    recurse(
        View::new(&pad(a), np),
        View::new(&pad(b), np),
        np,
        depth,
        &mut c,
        ops,
    );
    let mut out = Vec::with_capacity(n * n);
    for row in c.chunks_exact(np).take(n) {
        out.extend_from_slice(&row[..n]);
    }
    out
}

/// Writes the `n x n` product of `a` and `b` into the contiguous `c`.
fn recurse(a: View<'_>, b: View<'_>, n: usize, depth: u32, c: &mut [f64], ops: &mut OpCount) {
    if depth == 0 {
        gemm_strided(c, n, a, b, n, n, n, ops);
        return;
    }
    debug_assert!(n.is_multiple_of(2));
    let h = n / 2;
    let (a11, a12, a21, a22) = (a.at(0, 0), a.at(0, h), a.at(h, 0), a.at(h, h));
    let (b11, b12, b21, b22) = (b.at(0, 0), b.at(0, h), b.at(h, 0), b.at(h, h));

    let mut sa = vec![0.0; h * h];
    let mut sb = vec![0.0; h * h];
    let mut t = vec![0.0; h * h];
    let d = depth - 1;
    let quad = |qi: usize, qj: usize| qi * h * n + qj * h;
    let (c11, c12, c21, c22) = (quad(0, 0), quad(0, 1), quad(1, 0), quad(1, 1));

    combine(&mut sa, a11, a22, h, Op::Add, ops);
    combine(&mut sb, b11, b22, h, Op::Add, ops);
    recurse(View::new(&sa, h), View::new(&sb, h), h, d, &mut t, ops);
    store(c, n, c11, &t, h, Op::Set, ops);
    store(c, n, c22, &t, h, Op::Set, ops);

    combine(&mut sa, a21, a22, h, Op::Add, ops);
    recurse(View::new(&sa, h), b11, h, d, &mut t, ops);
    store(c, n, c21, &t, h, Op::Set, ops);
    store(c, n, c22, &t, h, Op::Sub, ops);

    combine(&mut sb, b12, b22, h, Op::Sub, ops);
    recurse(a11, View::new(&sb, h), h, d, &mut t, ops);
    store(c, n, c12, &t, h, Op::Set, ops);
    store(c, n, c22, &t, h, Op::Add, ops);

    combine(&mut sb, b21, b11, h, Op::Sub, ops);
    recurse(a22, View::new(&sb, h), h, d, &mut t, ops);
    store(c, n, c11, &t, h, Op::Add, ops);
    store(c, n, c21, &t, h, Op::Add, ops);

    combine(&mut sa, a11, a12, h, Op::Add, ops);
    recurse(View::new(&sa, h), b22, h, d, &mut t, ops);
    store(c, n, c12, &t, h, Op::Add, ops);
    store(c, n, c11, &t, h, Op::Sub, ops);

    combine(&mut sa, a21, a11, h, Op::Sub, ops);
    combine(&mut sb, b11, b12, h, Op::Add, ops);
    recurse(View::new(&sa, h), View::new(&sb, h), h, d, &mut t, ops);
    store(c, n, c22, &t, h, Op::Add, ops);

    combine(&mut sa, a12, a22, h, Op::Sub, ops);
    combine(&mut sb, b21, b22, h, Op::Add, ops);
    recurse(View::new(&sa, h), View::new(&sb, h), h, d, &mut t, ops);
    store(c, n, c11, &t, h, Op::Add, ops);
}

#[derive(Clone, Copy)]
enum Op {
    Set,
    Add,
    Sub,
}

/// `out = x ± y` over `h x h` windows.
fn combine(out: &mut [f64], x: View<'_>, y: View<'_>, h: usize, op: Op, ops: &mut OpCount) {
    for (i, o) in out.chunks_exact_mut(h).enumerate() {
        let (xr, yr) = (&x.d[i * x.ld..i * x.ld + h], &y.d[i * y.ld..i * y.ld + h]);
        match op {
            Op::Sub => o
                .iter_mut()
                .zip(xr.iter().zip(yr))
                .for_each(|(o, (p, q))| *o = p - q),
            _ => o
                .iter_mut()
                .zip(xr.iter().zip(yr))
                .for_each(|(o, (p, q))| *o = p + q),
        }
    }
    ops.adds += (h * h) as u64;
}

/// Sets, adds or subtracts the contiguous `h x h` block `t` at offset `off`
/// of `c` (row stride `ld`). Only `Add`/`Sub` are tallied.
fn store(c: &mut [f64], ld: usize, off: usize, t: &[f64], h: usize, op: Op, ops: &mut OpCount) {
    for (i, tr) in t.chunks_exact(h).enumerate() {
        let cr = &mut c[off + i * ld..off + i * ld + h];
        match op {
            Op::Set => cr.copy_from_slice(tr),
            Op::Add => cr.iter_mut().zip(tr).for_each(|(x, y)| *x += y),
            Op::Sub => cr.iter_mut().zip(tr).for_each(|(x, y)| *x -= y),
        }
    }
    if !matches!(op, Op::Set) {
        ops.adds += (h * h) as u64;
    }
}
