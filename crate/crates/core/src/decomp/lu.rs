use super::{check_width, subtract_dots, DecompStats, FixedWidth, PanelSchedule, Sweep};
use crate::error::{Error, Result};
use crate::matmul::{mul_rect, MulBackend};
use crate::matrix::{Matrix, Region};
use crate::oracle::{breakdown_tolerance, require_square};

/// `a = L U` without pivoting. `L` is lower triangular with its diagonal
/// kept; `U` is upper triangular with an exact unit diagonal.
pub fn blocked_lu(a: &Matrix, s: usize, backend: MulBackend) -> Result<(Matrix, Matrix)> {
    check_width(s, a.rows())?;
    blocked_lu_with(a, &FixedWidth(s), backend, &mut DecompStats::default())
}

pub fn blocked_lu_with(
    a: &Matrix,
    schedule: &dyn PanelSchedule,
    backend: MulBackend,
    stats: &mut DecompStats,
) -> Result<(Matrix, Matrix)> {
    let n = require_square("blocked_lu", a)?;
    let tol = breakdown_tolerance(a);
    let mut w = a.clone();
    let mut l = Matrix::zeros(n, n)?;
    // U is held transposed so that its columns are contiguous rows.
    let mut ut = Matrix::zeros(n, n)?;
    let mut sweep = Sweep::new(n, schedule)?;

    for c in 1..=n {
        if sweep.due(c) {
            let z = sweep.z;
            let rl = l.copy_region(Region::new((c, n), (z, c - 1)))?;
            let ru = ut.copy_region(Region::new((c, n), (z, c - 1)))?.transpose();
            let prod = mul_rect(&rl, &ru, backend, c - z, &mut stats.flush)?;
            w.sub_assign_region(Region::new((c, n), (c, n)), &prod)?;
            stats.flush.adds += (prod.rows() * prod.cols()) as u64;
            sweep.advance(c, stats)?;
        }

        let (k0, cc) = (sweep.z - 1, c - 1);
        let width = (cc - k0) as u64;
        let rows = (n - cc) as u64;

        let mut col: Vec<f64> = (cc..n).map(|i| w[(i, cc)]).collect();
        subtract_dots(&l, cc..n, k0..cc, &ut.row(cc)[k0..cc], &mut col);
        for (i, v) in (cc..n).zip(col) {
            l[(i, cc)] = v;
        }
        stats.panel.mults += rows * width;
        stats.panel.adds += rows * width;

        let pivot = l[(cc, cc)];
        if !(pivot.abs() >= tol) || pivot == 0.0 {
            return Err(Error::SingularLeadingMinor { column: c });
        }

        let mut row = w.row(cc)[cc..].to_vec();
        subtract_dots(&ut, cc..n, k0..cc, &l.row(cc)[k0..cc], &mut row);
        for (i, v) in (cc..n).zip(row) {
            ut[(i, cc)] = v / pivot;
        }
        stats.panel.mults += rows * width;
        stats.panel.adds += rows * width;
    }
    Ok((l, ut.transpose()))
}
