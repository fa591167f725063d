//! Classical product on raw row-major buffers.

use super::OpCount;

const MR: usize = 4;

/// `c = a * b` for an `m x k` by `k x p` product; `c` is overwritten.
///
/// Every entry accumulates its `k` terms in ascending order starting from the
/// first product, so the result is bit-identical to a k-innermost triple
/// loop. Full `MR x NR` tiles of `c` are held in registers across `k`.
///
/// On x86_64 with AVX2 a wider tile is compiled with that feature enabled.
/// Multiplies and adds stay separate (no FMA), so rounding is unchanged.
pub(crate) fn gemm(
    c: &mut [f64],
    a: &[f64],
    b: &[f64],
    m: usize,
    k: usize,
    p: usize,
    ops: &mut OpCount,
) {
    assert!(a.len() == m * k && b.len() == k * p && c.len() == m * p);
    gemm_strided(c, p, View::new(a, k), View::new(b, p), m, k, p, ops);
}

/// Row-major window into a larger buffer: element `(i, j)` is `d[i * ld + j]`.
#[derive(Clone, Copy)]
pub(crate) struct View<'a> {
    pub d: &'a [f64],
    pub ld: usize,
}

impl<'a> View<'a> {
    pub fn new(d: &'a [f64], ld: usize) -> Self {
        View { d, ld }
    }

    /// Sub-window starting at `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> View<'a> {
        View {
            d: &self.d[i * self.ld + j..],
            ld: self.ld,
        }
    }

    #[inline(always)]
    fn row(&self, i: usize, len: usize) -> &'a [f64] {
        &self.d[i * self.ld..i * self.ld + len]
    }
}

/// [`gemm`] over strided operands; `c` has row stride `ldc`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm_strided(
    c: &mut [f64],
    ldc: usize,
    a: View<'_>,
    b: View<'_>,
    m: usize,
    k: usize,
    p: usize,
    ops: &mut OpCount,
) {
    assert!(k > 0 && m > 0 && p > 0);
    assert!(c.len() >= (m - 1) * ldc + p);
    assert!(a.d.len() >= (m - 1) * a.ld + k && b.d.len() >= (k - 1) * b.ld + p);

    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { gemm_avx2(c, ldc, a, b, m, k, p) };
        } else {
            gemm_tiles::<4>(c, ldc, a, b, m, k, p);
        }
    }
    #[cfg(not(target_arch = "x86_64"))]
    gemm_tiles::<4>(c, ldc, a, b, m, k, p);

    let (m, k, p) = (m as u64, k as u64, p as u64);
    ops.mults += m * k * p;
    ops.adds += m * p * (k - 1);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn gemm_avx2(
    c: &mut [f64],
    ldc: usize,
    a: View<'_>,
    b: View<'_>,
    m: usize,
    k: usize,
    p: usize,
) {
    gemm_tiles::<8>(c, ldc, a, b, m, k, p);
}

#[inline(always)]
fn gemm_tiles<const NR: usize>(
    c: &mut [f64],
    ldc: usize,
    a: View<'_>,
    b: View<'_>,
    m: usize,
    k: usize,
    p: usize,
) {
    let mut i = 0;
    while i < m {
        let left = m - i;
        if left >= MR {
            row_block::<MR, NR>(c, ldc, a, b, i, k, p);
            i += MR;
        } else if left >= 2 {
            row_block::<2, NR>(c, ldc, a, b, i, k, p);
            i += 2;
        } else {
            row_block::<1, NR>(c, ldc, a, b, i, k, p);
            i += 1;
        }
    }
}

/// Rows `i..i+R` across all columns, narrowing the tile for the ragged end.
#[inline(always)]
fn row_block<const R: usize, const NR: usize>(
    c: &mut [f64],
    ldc: usize,
    a: View<'_>,
    b: View<'_>,
    i: usize,
    k: usize,
    p: usize,
) {
    let mut j = 0;
    while p - j >= NR {
        micro::<R, NR>(c, ldc, a, b, i, j, k);
        j += NR;
    }
    if NR > 4 && p - j >= 4 {
        micro::<R, 4>(c, ldc, a, b, i, j, k);
        j += 4;
    }
    if p - j >= 2 {
        micro::<R, 2>(c, ldc, a, b, i, j, k);
        j += 2;
    }
    if p - j == 1 {
        micro::<R, 1>(c, ldc, a, b, i, j, k);
    }
}

#[inline(always)]
#[allow(clippy::needless_range_loop)]
fn micro<const R: usize, const W: usize>(
    c: &mut [f64],
    ldc: usize,
    a: View<'_>,
    b: View<'_>,
    i: usize,
    j: usize,
    k: usize,
) {
    let a_rows: [&[f64]; R] = std::array::from_fn(|r| a.row(i + r, k));
    let mut acc = [[0.0f64; W]; R];
    let b0 = &b.d[j..j + W];
    for r in 0..R {
        for q in 0..W {
            acc[r][q] = a_rows[r][0] * b0[q];
        }
    }
    for kk in 1..k {
        let bk = &b.d[kk * b.ld + j..kk * b.ld + j + W];
        for r in 0..R {
            let x = a_rows[r][kk];
            for q in 0..W {
                acc[r][q] += x * bk[q];
            }
        }
    }
    for r in 0..R {
        c[(i + r) * ldc + j..(i + r) * ldc + j + W].copy_from_slice(&acc[r]);
    }
}
