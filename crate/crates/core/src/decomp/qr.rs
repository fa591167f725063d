use super::{check_width, DecompStats, FixedWidth, PanelSchedule, Sweep};
use crate::error::{Error, Result};
use crate::matmul::{mul_at_b, mul_rect, MulBackend};
use crate::matrix::{Matrix, Region};
use crate::oracle::{breakdown_tolerance, require_square};

/// Gram-Schmidt QR of a square full-rank `a` with panel-deferred
/// projections. `R = Qᵀ a` is formed with one square product and its strict
/// lower triangle is zeroed (the discarded mass goes to
/// [`DecompStats::discarded_lower_mass`]).
pub fn blocked_qr(a: &Matrix, s: usize, backend: MulBackend) -> Result<(Matrix, Matrix)> {
    check_width(s, a.rows())?;
    blocked_qr_with(a, &FixedWidth(s), backend, &mut DecompStats::default())
}

pub fn blocked_qr_with(
    a: &Matrix,
    schedule: &dyn PanelSchedule,
    backend: MulBackend,
    stats: &mut DecompStats,
) -> Result<(Matrix, Matrix)> {
    let n = require_square("blocked_qr", a)?;
    let tol = breakdown_tolerance(a);
    // Working copies are held transposed: row j is column j of M (or Q).
    let mut mt = a.transpose();
    let mut qt = Matrix::zeros(n, n)?;
    let mut sweep = Sweep::new(n, schedule)?;
    let nn = n as u64;

    for c in 1..=n {
        if sweep.due(c) {
            let z = sweep.z;
            let bq = qt.copy_region(Region::new((z, c - 1), (1, n)))?.transpose();
            let bm = mt.copy_region(Region::new((c, n), (1, n)))?.transpose();
            let tile = c - z;
            let coef = mul_at_b(&bq, &bm, backend, tile, &mut stats.flush)?;
            let prod = mul_rect(&bq, &coef, backend, tile, &mut stats.flush)?;
            mt.sub_assign_region(Region::new((c, n), (1, n)), &prod.transpose())?;
            stats.flush.adds += (prod.rows() * prod.cols()) as u64;
            sweep.advance(c, stats)?;
        }

        let cc = c - 1;
        let mut v = mt.row(cc).to_vec();
        for j in sweep.z - 1..cc {
            let u = qt.row(j);
            let mut dot = u[0] * v[0];
            for (x, y) in u[1..].iter().zip(&v[1..]) {
                dot += x * y;
            }
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= ui * dot;
            }
            stats.panel.mults += 2 * nn;
            stats.panel.adds += 2 * nn - 1;
        }

        let mut ss = v[0] * v[0];
        for x in &v[1..] {
            ss += x * x;
        }
        stats.panel.mults += nn;
        stats.panel.adds += nn - 1;
        let norm = ss.sqrt();
        if !(norm >= tol) || norm == 0.0 {
            return Err(Error::RankDeficient { column: c });
        }
        for (q, x) in qt.row_mut(cc).iter_mut().zip(&v) {
            *q = x / norm;
        }
    }

    let q = qt.transpose();
    let mut r = mul_at_b(&q, a, backend, n, &mut stats.finish)?;
    let mut lower = 0.0;
    for i in 1..n {
        for x in &mut r.row_mut(i)[..i] {
            lower += *x * *x;
            *x = 0.0;
        }
    }
    stats.discarded_lower_mass = lower.sqrt();
    Ok((q, r))
}
