//! Factor bundles, residual checks and the per-run record.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decomp::{
    blocked_cholesky_with, blocked_lu_with, blocked_qr_with, DecompStats, PanelSchedule,
};
use crate::error::{Error, Result};
use crate::matmul::{mul_classical, MulBackend, OpCount};
use crate::matrix::Matrix;
use crate::oracle::{cholesky_crout, lu_crout_unit_u, qr_mgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Cholesky,
    Lu,
    Qr,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Cholesky, Kind::Lu, Kind::Qr];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Cholesky => "cholesky",
            Kind::Lu => "lu",
            Kind::Qr => "qr",
        }
    }

    /// File-name tags of the factors, in output order.
    pub fn factor_names(&self) -> &'static [&'static str] {
        match self {
            Kind::Cholesky => &["L"],
            Kind::Lu => &["L", "U"],
            Kind::Qr => &["Q", "R"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown decomposition {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factors {
    Cholesky(Matrix),
    Lu(Matrix, Matrix),
    Qr(Matrix, Matrix),
}

impl Factors {
    pub fn kind(&self) -> Kind {
        match self {
            Factors::Cholesky(_) => Kind::Cholesky,
            Factors::Lu(..) => Kind::Lu,
            Factors::Qr(..) => Kind::Qr,
        }
    }

    pub fn matrices(&self) -> Vec<&Matrix> {
        match self {
            Factors::Cholesky(l) => vec![l],
            Factors::Lu(a, b) | Factors::Qr(a, b) => vec![a, b],
        }
    }

    /// Builds a bundle from factors listed in [`Kind::factor_names`] order.
    pub fn from_parts(kind: Kind, mut parts: Vec<Matrix>) -> Result<Self> {
        let want = kind.factor_names().len();
        if parts.len() != want {
            return Err(Error::Parse {
                line: 0,
                msg: format!("{kind} needs {want} factor file(s), got {}", parts.len()),
            });
        }
        Ok(match kind {
            Kind::Cholesky => Factors::Cholesky(parts.remove(0)),
            Kind::Lu => {
                let l = parts.remove(0);
                Factors::Lu(l, parts.remove(0))
            }
            Kind::Qr => {
                let q = parts.remove(0);
                Factors::Qr(q, parts.remove(0))
            }
        })
    }

    /// The product the factors claim to equal.
    pub fn reconstruct(&self) -> Result<Matrix> {
        let mut ops = OpCount::default();
        match self {
            Factors::Cholesky(l) => mul_classical(l, &l.transpose(), &mut ops),
            Factors::Lu(a, b) | Factors::Qr(a, b) => mul_classical(a, b, &mut ops),
        }
    }

    /// Nonzeros in the structurally zero triangles: above the diagonal of
    /// `L`, below it in `U` and `R`.
    pub fn violations(&self) -> usize {
        match self {
            Factors::Cholesky(l) => count_nonzero(l, |i, j| j > i),
            Factors::Lu(l, u) => count_nonzero(l, |i, j| j > i) + count_nonzero(u, |i, j| j < i),
            Factors::Qr(_, r) => count_nonzero(r, |i, j| j < i),
        }
    }
}

fn count_nonzero(m: &Matrix, zero_at: impl Fn(usize, usize) -> bool) -> usize {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, &x)| zero_at(i, j) && x != 0.0)
                .count()
        })
        .sum()
}

/// `‖QᵀQ − I‖_F`.
pub fn orthogonality(q: &Matrix) -> Result<f64> {
    let qtq = mul_classical(&q.transpose(), q, &mut OpCount::default())?;
    Ok(qtq.sub(&Matrix::identity(q.cols())?)?.frobenius())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    /// `‖A − reconstruction‖_F / ‖A‖_F`.
    pub residual_rel: f64,
    pub orth_rel: Option<f64>,
    pub violations: usize,
}

impl Verification {
    /// Standalone acceptance rule: residual within `1e-9 n`, no structural
    /// nonzeros.
    pub fn passes(&self, n: usize) -> bool {
        self.residual_rel <= 1e-9 * n as f64 && self.violations == 0
    }
}

pub fn verify(a: &Matrix, factors: &Factors) -> Result<Verification> {
    let recon = factors.reconstruct()?;
    let diff = a.sub(&recon)?.frobenius();
    let scale = a.frobenius();
    let residual_rel = if scale > 0.0 { diff / scale } else { diff };
    let orth_rel = match factors {
        Factors::Qr(q, _) => Some(orthogonality(q)?),
        _ => None,
    };
    Ok(Verification {
        residual_rel,
        orth_rel,
        violations: factors.violations(),
    })
}

/// Blocked factorization of the requested kind.
pub fn factorize(
    kind: Kind,
    a: &Matrix,
    schedule: &dyn PanelSchedule,
    backend: MulBackend,
    stats: &mut DecompStats,
) -> Result<Factors> {
    Ok(match kind {
        Kind::Cholesky => Factors::Cholesky(blocked_cholesky_with(a, schedule, backend, stats)?),
        Kind::Lu => {
            let (l, u) = blocked_lu_with(a, schedule, backend, stats)?;
            Factors::Lu(l, u)
        }
        Kind::Qr => {
            let (q, r) = blocked_qr_with(a, schedule, backend, stats)?;
            Factors::Qr(q, r)
        }
    })
}

/// Unblocked reference factorization of the requested kind.
pub fn factorize_oracle(kind: Kind, a: &Matrix) -> Result<Factors> {
    Ok(match kind {
        Kind::Cholesky => Factors::Cholesky(cholesky_crout(a)?),
        Kind::Lu => {
            let (l, u) = lu_crout_unit_u(a)?;
            Factors::Lu(l, u)
        }
        Kind::Qr => {
            let (q, r) = qr_mgs(a)?;
            Factors::Qr(q, r)
        }
    })
}

/// One decomposition run. Optional fields are blank in CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub n: usize,
    pub s: Option<usize>,
    pub backend: String,
    pub depth: Option<u32>,
    pub seed: Option<u64>,
    pub wall_seconds: f64,
    pub mults: u64,
    pub adds: u64,
    pub flushes: usize,
    pub residual_rel: Option<f64>,
    pub orth_rel: Option<f64>,
    pub discarded_lower_mass: Option<f64>,
    pub error: Option<String>,
}

impl RunReport {
    pub const COLUMNS: [&'static str; 14] = [
        "kind",
        "n",
        "s",
        "backend",
        "depth",
        "seed",
        "wall_seconds",
        "mults",
        "adds",
        "flushes",
        "residual_rel",
        "orth_rel",
        "discarded_lower_mass",
        "error",
    ];

    pub fn new(kind: Kind, n: usize, s: Option<usize>, backend: Option<MulBackend>) -> Self {
        RunReport {
            kind: kind.name().into(),
            n,
            s,
            backend: backend.map_or("oracle", |b| b.name()).into(),
            depth: backend.map(|b| b.depth()),
            seed: None,
            wall_seconds: 0.0,
            mults: 0,
            adds: 0,
            flushes: 0,
            residual_rel: None,
            orth_rel: None,
            discarded_lower_mass: None,
            error: None,
        }
    }

    pub fn record_stats(&mut self, kind: Kind, stats: &DecompStats) {
        let t = stats.total();
        self.mults = t.mults;
        self.adds = t.adds;
        self.flushes = stats.flushes;
        if kind == Kind::Qr {
            self.discarded_lower_mass = Some(stats.discarded_lower_mass);
        }
    }

    pub fn record_verification(&mut self, v: &Verification) {
        self.residual_rel = Some(v.residual_rel);
        self.orth_rel = v.orth_rel;
    }
}

/// Runs one blocked factorization and times it with the wall clock.
pub fn timed_factorize(
    kind: Kind,
    a: &Matrix,
    schedule: &dyn PanelSchedule,
    backend: MulBackend,
) -> (Result<Factors>, DecompStats, f64) {
    let mut stats = DecompStats::default();
    let t0 = Instant::now();
    let out = factorize(kind, a, schedule, backend, &mut stats);
    (out, stats, t0.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::FixedWidth;
    use crate::generate::{gen_general, gen_spd};

    #[test]
    fn hand_cholesky_verifies_exactly() {
        let a = Matrix::from_rows(&[[4., 2.], [2., 5.]]).unwrap();
        let l = Matrix::from_rows(&[[2., 0.], [1., 2.]]).unwrap();
        let v = verify(&a, &Factors::Cholesky(l.clone())).unwrap();
        assert_eq!(v.residual_rel, 0.0);
        assert!(v.passes(2));

        let mut bad = l.clone();
        bad[(1, 0)] += 0.1;
        let v = verify(&a, &Factors::Cholesky(bad)).unwrap();
        assert!(v.residual_rel > 0.0 && !v.passes(2));

        let mut upper = l;
        upper[(0, 1)] = 1e-3;
        let v = verify(&a, &Factors::Cholesky(upper)).unwrap();
        assert!(v.violations >= 1 && !v.passes(2));
    }

    #[test]
    fn every_kind_round_trips_through_verify() {
        for kind in Kind::ALL {
            let a = if kind == Kind::Cholesky {
                gen_spd(24, 3)
            } else {
                gen_general(24, 3)
            }
            .unwrap();
            let mut stats = DecompStats::default();
            let f = factorize(
                kind,
                &a,
                &FixedWidth(5),
                MulBackend::strassen(1),
                &mut stats,
            )
            .unwrap();
            assert_eq!(f.kind(), kind);
            let v = verify(&a, &f).unwrap();
            assert!(v.passes(24), "{kind}: {v:?}");
            assert_eq!(v.orth_rel.is_some(), kind == Kind::Qr);
            let o = factorize_oracle(kind, &a).unwrap();
            for (x, y) in f.matrices().into_iter().zip(o.matrices()) {
                assert!(x.max_abs_diff(y).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn identity_qr_is_exact() {
        let eye = Matrix::identity(5).unwrap();
        let f = factorize(
            Kind::Qr,
            &eye,
            &FixedWidth(2),
            MulBackend::Classical,
            &mut DecompStats::default(),
        )
        .unwrap();
        let v = verify(&eye, &f).unwrap();
        assert!(v.orth_rel.unwrap() <= 1e-15);
        assert_eq!(v.residual_rel, 0.0);
    }

    #[test]
    fn kinds_parse() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
        }
        assert!("svd".parse::<Kind>().is_err());
        assert!(Factors::from_parts(Kind::Lu, vec![Matrix::identity(2).unwrap()]).is_err());
    }

    #[test]
    fn report_fields() {
        let mut r = RunReport::new(Kind::Qr, 8, Some(2), Some(MulBackend::strassen(2)));
        assert_eq!((r.backend.as_str(), r.depth), ("strassen", Some(2)));
        let mut stats = DecompStats::default();
        stats.panel.mults = 3;
        stats.flush.adds = 4;
        stats.flushes = 1;
        r.record_stats(Kind::Qr, &stats);
        assert_eq!((r.mults, r.adds, r.flushes), (3, 4, 1));
        assert_eq!(r.discarded_lower_mass, Some(0.0));
        let o = RunReport::new(Kind::Lu, 8, None, None);
        assert_eq!((o.backend.as_str(), o.depth), ("oracle", None));
    }
}
