//! Unblocked reference factorizations.
//!
//! These are written independently of [`crate::decomp`] and serve as the
//! ground truth the blocked algorithms are checked against. Loop orders are
//! fixed (inner `k` ascending) so that the blocked code with `s = n`
//! reproduces them bit for bit.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Pivot and column-norm threshold: `1e-12 * ‖A‖_F / n`.
pub fn breakdown_tolerance(a: &Matrix) -> f64 {
    1e-12 * a.frobenius() / a.rows() as f64
}

pub(crate) fn require_square(op: &'static str, a: &Matrix) -> Result<usize> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(Error::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

/// Left-looking Cholesky: column `c` is formed from all finished columns.
pub fn cholesky_crout(a: &Matrix) -> Result<Matrix> {
    let n = require_square("cholesky_crout", a)?;
    let mut l = Matrix::zeros(n, n)?;
    for c in 0..n {
        let mut d = a[(c, c)];
        for k in 0..c {
            d -= l[(c, k)] * l[(c, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { column: c + 1 });
        }
        let d = d.sqrt();
        l[(c, c)] = d;
        for i in c + 1..n {
            let mut v = a[(i, c)];
            {
                let (li, lc) = (l.row(i), l.row(c));
                for k in 0..c {
                    v -= li[k] * lc[k];
                }
            }
            l[(i, c)] = v / d;
        }
    }
    Ok(l)
}

/// Right-looking Cholesky: after each column the trailing block is updated
/// by `-v vᵀ`.
pub fn cholesky_recursive(a: &Matrix) -> Result<Matrix> {
    let n = require_square("cholesky_recursive", a)?;
    let mut w = a.clone();
    let mut l = Matrix::zeros(n, n)?;
    for c in 0..n {
        let d = w[(c, c)];
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { column: c + 1 });
        }
        let d = d.sqrt();
        l[(c, c)] = d;
        for i in c + 1..n {
            l[(i, c)] = w[(i, c)] / d;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                w[(i, j)] -= l[(i, c)] * l[(j, c)];
            }
        }
    }
    Ok(l)
}

/// Crout LU without pivoting: `L` keeps its diagonal, `U` has a unit one.
pub fn lu_crout_unit_u(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = require_square("lu_crout_unit_u", a)?;
    let tol = breakdown_tolerance(a);
    let mut l = Matrix::zeros(n, n)?;
    let mut u = Matrix::zeros(n, n)?;
    for c in 0..n {
        for i in c..n {
            let mut v = a[(i, c)];
            for k in 0..c {
                v -= l[(i, k)] * u[(k, c)];
            }
            l[(i, c)] = v;
        }
        let pivot = l[(c, c)];
        if !(pivot.abs() >= tol) || pivot == 0.0 {
            return Err(Error::SingularLeadingMinor { column: c + 1 });
        }
        for i in c..n {
            let mut v = a[(c, i)];
            for k in 0..c {
                v -= l[(c, k)] * u[(k, i)];
            }
            u[(c, i)] = v / pivot;
        }
    }
    Ok((l, u))
}

/// Modified Gram-Schmidt QR of a square matrix, then `R = Qᵀ A`.
pub fn qr_mgs(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = require_square("qr_mgs", a)?;
    let tol = breakdown_tolerance(a);
    let mut q = Matrix::zeros(n, n)?;
    let mut v = vec![0.0; n];
    for c in 0..n {
        for i in 0..n {
            v[i] = a[(i, c)];
        }
        for j in 0..c {
            let mut dot = q[(0, j)] * v[0];
            for i in 1..n {
                dot += q[(i, j)] * v[i];
            }
            for i in 0..n {
                v[i] -= q[(i, j)] * dot;
            }
        }
        let mut ss = v[0] * v[0];
        for x in &v[1..] {
            ss += x * x;
        }
        let norm = ss.sqrt();
        if !(norm >= tol) || norm == 0.0 {
            return Err(Error::RankDeficient { column: c + 1 });
        }
        for i in 0..n {
            q[(i, c)] = v[i] / norm;
        }
    }

    let mut r = Matrix::zeros(n, n)?;
    for i in 0..n {
        for j in 0..n {
            let mut s = q[(0, i)] * a[(0, j)];
            for k in 1..n {
                s += q[(k, i)] * a[(k, j)];
            }
            r[(i, j)] = s;
        }
    }
    for c in 0..n {
        if r[(c, c)] < 0.0 {
            for i in 0..n {
                q[(i, c)] = -q[(i, c)];
            }
            for x in r.row_mut(c) {
                *x = -*x;
            }
        }
        for j in 0..c {
            r[(c, j)] = 0.0;
        }
    }
    Ok((q, r))
}
