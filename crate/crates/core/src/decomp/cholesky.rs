use super::{check_width, subtract_dots, DecompStats, FixedWidth, PanelSchedule, Sweep};
use crate::error::{Error, Result};
use crate::matmul::{mul_a_bt, MulBackend};
use crate::matrix::{Matrix, Region};
use crate::oracle::require_square;

/// Cholesky factor `L` of a symmetric positive-definite `a`, deferring
/// trailing updates for `s` columns at a time.
pub fn blocked_cholesky(a: &Matrix, s: usize, backend: MulBackend) -> Result<Matrix> {
    check_width(s, a.rows())?;
    blocked_cholesky_with(a, &FixedWidth(s), backend, &mut DecompStats::default())
}

pub fn blocked_cholesky_with(
    a: &Matrix,
    schedule: &dyn PanelSchedule,
    backend: MulBackend,
    stats: &mut DecompStats,
) -> Result<Matrix> {
    let n = require_square("blocked_cholesky", a)?;
    let mut w = a.clone();
    let mut l = Matrix::zeros(n, n)?;
    let mut sweep = Sweep::new(n, schedule)?;

    for c in 1..=n {
        if sweep.due(c) {
            let z = sweep.z;
            let r = l.copy_region(Region::new((c, n), (z, c - 1)))?;
            let prod = mul_a_bt(&r, &r, backend, c - z, &mut stats.flush)?;
            w.sub_assign_region(Region::new((c, n), (c, n)), &prod)?;
            stats.flush.adds += (prod.rows() * prod.cols()) as u64;
            sweep.advance(c, stats)?;
        }

        let (k0, cc) = (sweep.z - 1, c - 1);
        let width = (cc - k0) as u64;

        let mut d = w[(cc, cc)];
        for &x in &l.row(cc)[k0..cc] {
            d -= x * x;
        }
        stats.panel.mults += width;
        stats.panel.adds += width;
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { column: c });
        }
        let d = d.sqrt();
        l[(cc, cc)] = d;

        let mut col: Vec<f64> = (cc + 1..n).map(|i| w[(i, cc)]).collect();
        subtract_dots(&l, cc + 1..n, k0..cc, &l.row(cc)[k0..cc], &mut col);
        for (i, v) in (cc + 1..n).zip(col) {
            l[(i, cc)] = v / d;
        }
        let rows = (n - c) as u64;
        stats.panel.mults += rows * width;
        stats.panel.adds += rows * width;
    }
    Ok(l)
}
