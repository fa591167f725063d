//! Panel-width selection and an analytic operation-count model.
//!
//! The model is evaluated in closed form from the tiling and recursion rules
//! of [`crate::matmul`]; it never runs a product. For a fixed width `s` the
//! Cholesky/LU sweep flushes at `c = 1 + j*s` for `j = 1..=floor((n-1)/s)`,
//! each flush multiplying an `m x s` by `s x m` pair with `m = n - j*s` and
//! subtracting the `m x m` result.

use serde::{Deserialize, Serialize};

use crate::decomp::{PanelSchedule, PanelState};
use crate::matmul::{MulBackend, OpCount};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlockPolicy {
    Fixed(usize),
    /// `s = ceil(n^k)`.
    Exponent(f64),
}

impl BlockPolicy {
    /// Panel width for order `n`, clamped to `1..=n`.
    pub fn resolve(&self, n: usize) -> usize {
        let raw = match *self {
            BlockPolicy::Fixed(s) => s,
            BlockPolicy::Exponent(k) => {
                let v = (n as f64).powf(k).ceil();
                if v.is_nan() {
                    1
                } else {
                    // saturating float-to-int cast
                    v as usize
                }
            }
        };
        raw.clamp(1, n.max(1))
    }
}

impl PanelSchedule for BlockPolicy {
    fn width(&self, n: usize, _state: PanelState) -> usize {
        self.resolve(n)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub panel_ops: u64,
    pub flush_ops: u64,
    pub total: u64,
    /// Flush term split into multiplications and additions.
    pub flush: OpCount,
}

/// Cost of one `t x t` block product under `backend`.
pub fn block_cost(t: usize, backend: MulBackend) -> OpCount {
    let t = t as u64;
    let d = backend.effective_depth(t as usize);
    let unit = 1u64 << d;
    let tp = t.div_ceil(unit) * unit;
    let leaf = tp / unit;
    let leaves = 7u64.pow(d);
    let mut adds = leaves * leaf * leaf * (leaf - 1);
    for l in 0..d {
        let h = tp >> (l + 1);
        adds += 7u64.pow(l) * 18 * h * h;
    }
    OpCount {
        mults: leaves * leaf * leaf * leaf,
        adds,
        block_products: 1,
    }
}

/// Cost of an `m x k` by `k x p` product tiled into `t x t` blocks,
/// including the additions that sum partial products along `k`.
pub fn rect_product_cost(m: usize, k: usize, p: usize, t: usize, backend: MulBackend) -> OpCount {
    let (mb, kb, pb) = (
        m.div_ceil(t) as u64,
        k.div_ceil(t) as u64,
        p.div_ceil(t) as u64,
    );
    let one = block_cost(t, backend);
    let n = mb * kb * pb;
    OpCount {
        mults: n * one.mults,
        adds: n * one.adds + mb * pb * kb.saturating_sub(1) * (t * t) as u64,
        block_products: n,
    }
}

/// Predicted work of a fixed-width Cholesky/LU sweep of order `n`.
/// `s` is clamped to `1..=n`.
pub fn predict_cost(n: usize, s: usize, backend: MulBackend) -> CostEstimate {
    if n == 0 {
        return CostEstimate::default();
    }
    let s = s.clamp(1, n);
    let mut flush = OpCount::default();
    for j in 1..=(n - 1) / s {
        let m = n - j * s;
        flush += rect_product_cost(m, s, m, s, backend);
        flush.adds += (m * m) as u64;
    }
    let panel_ops = (n * n * s) as u64;
    let flush_ops = flush.total();
    CostEstimate {
        panel_ops,
        flush_ops,
        total: panel_ops + flush_ops,
        flush,
    }
}

/// Estimates for each candidate width, cheapest first; ties go to the
/// smaller `s`.
pub fn sweep_s(n: usize, candidates: &[usize], backend: MulBackend) -> Vec<(usize, CostEstimate)> {
    let mut rows: Vec<_> = candidates
        .iter()
        .map(|&s| (s, predict_cost(n, s, backend)))
        .collect();
    rows.sort_by_key(|(s, e)| (e.total, *s));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{blocked_cholesky_with, blocked_lu_with, DecompStats, FixedWidth};
    use crate::generate::{gen_general, gen_spd};
    use crate::matmul::mul_rect;
    use crate::matrix::Matrix;
    use proptest::prelude::*;

    #[test]
    fn resolve_examples() {
        assert_eq!(BlockPolicy::Fixed(200).resolve(2000), 200);
        assert_eq!(BlockPolicy::Exponent(0.8385).resolve(4096), 1069);
        assert_eq!(BlockPolicy::Exponent(0.8385).resolve(2048), 598);
        assert_eq!(BlockPolicy::Exponent(0.8385).resolve(512), 187);
        assert_eq!(BlockPolicy::Fixed(1_000_000_000).resolve(100), 100);
        assert_eq!(BlockPolicy::Fixed(0).resolve(10), 1);
        assert_eq!(BlockPolicy::Exponent(-3.0).resolve(10), 1);
        assert_eq!(BlockPolicy::Exponent(f64::INFINITY).resolve(10), 10);
        assert_eq!(BlockPolicy::Exponent(f64::NAN).resolve(10), 1);
    }

    proptest! {
        #[test]
        fn exponent_resolve_is_monotone_and_clamped(k in 0.0f64..1.5, n in 1usize..5000) {
            let p = BlockPolicy::Exponent(k);
            let s = p.resolve(n);
            prop_assert!((1..=n).contains(&s));
            prop_assert!(p.resolve(n + 1) >= s);
        }
    }

    #[test]
    fn block_cost_matches_strassen_law() {
        for n in [32, 64] {
            for d in 1..=3u32 {
                let c = block_cost(n, MulBackend::strassen(d));
                let leaf = (n >> d) as u64;
                assert_eq!(c.mults, 7u64.pow(d) * leaf * leaf * leaf);
            }
        }
        assert_eq!(
            block_cost(4, MulBackend::strassen(1)),
            OpCount {
                mults: 56,
                adds: 100,
                block_products: 1
            }
        );
        assert_eq!(block_cost(5, MulBackend::Classical).adds, 25 * 4);
    }

    #[test]
    fn rect_cost_matches_instrumentation() {
        let shapes = [
            (7, 5, 9, 2),
            (33, 17, 20, 6),
            (16, 16, 16, 4),
            (1, 1, 1, 3),
            (10, 3, 1, 4),
        ];
        for backend in [
            MulBackend::Classical,
            MulBackend::strassen(1),
            MulBackend::strassen(3),
        ] {
            for (m, k, p, t) in shapes {
                let a = Matrix::zeros(m, k).unwrap();
                let b = Matrix::zeros(k, p).unwrap();
                let mut ops = OpCount::default();
                mul_rect(&a, &b, backend, t, &mut ops).unwrap();
                assert_eq!(
                    rect_product_cost(m, k, p, t, backend),
                    ops,
                    "{m}x{k}x{p} t={t} {backend}"
                );
            }
        }
    }

    #[test]
    fn flush_term_equals_instrumented_counts() {
        for (n, s, backend) in [
            (64, 8, MulBackend::strassen(1)),
            (64, 16, MulBackend::strassen(2)),
            (32, 4, MulBackend::Classical),
            (37, 5, MulBackend::strassen(2)),
            (20, 1, MulBackend::strassen(1)),
        ] {
            let est = predict_cost(n, s, backend);
            let mut stats = DecompStats::default();
            blocked_cholesky_with(&gen_spd(n, 1).unwrap(), &FixedWidth(s), backend, &mut stats)
                .unwrap();
            assert_eq!(est.flush, stats.flush, "cholesky n={n} s={s}");
            let mut stats = DecompStats::default();
            blocked_lu_with(
                &gen_general(n, 1).unwrap(),
                &FixedWidth(s),
                backend,
                &mut stats,
            )
            .unwrap();
            assert_eq!(est.flush, stats.flush, "lu n={n} s={s}");
        }
    }

    #[test]
    fn n64_s8_depth1_values() {
        let e = predict_cost(64, 8, MulBackend::strassen(1));
        assert_eq!(e.panel_ops, 32768);
        assert_eq!(e.flush.mults, 62720);
        assert_eq!(e.flush.adds, 96320);
        assert_eq!(e.total, e.panel_ops + e.flush_ops);
    }

    #[test]
    fn degenerate_widths() {
        for n in [1, 5, 64] {
            let e = predict_cost(n, n, MulBackend::strassen(2));
            assert_eq!(e.flush_ops, 0);
            assert_eq!(e.total, (n * n * n) as u64);
        }
        // s = 1, classical: each flush is an m x 1 by 1 x m outer product plus m^2 subtractions
        let n = 30u64;
        let e = predict_cost(n as usize, 1, MulBackend::Classical);
        let expect: u64 = (1..n).map(|m| 2 * m * m).sum();
        assert_eq!(e.flush_ops, expect);
        assert_eq!(e.flush.mults, e.flush.adds);
    }

    #[test]
    fn sweep_orders_and_breaks_ties() {
        let one = sweep_s(100, &[7], MulBackend::Classical);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].0, 7);

        let ranked: Vec<usize> = sweep_s(2000, &[400, 50, 200, 100], MulBackend::Classical)
            .into_iter()
            .map(|(s, _)| s)
            .collect();
        assert_eq!(ranked, [50, 100, 200, 400]);

        let rows = sweep_s(9, &[9, 9, 9], MulBackend::Classical);
        assert!(rows.iter().all(|(_, e)| e.flush_ops == 0));
        let rows = sweep_s(4, &[4, 3, 2], MulBackend::Classical);
        let totals: Vec<u64> = rows.iter().map(|(_, e)| e.total).collect();
        assert!(totals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn endpoints_versus_interior() {
        for n in [16usize, 64, 256, 1024] {
            let interior: Vec<usize> = (2..n).collect();
            for backend in [
                MulBackend::Classical,
                MulBackend::strassen(1),
                MulBackend::strassen(2),
            ] {
                let best = interior
                    .iter()
                    .map(|&s| predict_cost(n, s, backend).total)
                    .min()
                    .unwrap();
                assert!(predict_cost(n, n, backend).total >= best, "n={n} {backend}");
                if backend != MulBackend::Classical {
                    assert!(predict_cost(n, 1, backend).total >= best, "n={n} {backend}");
                }
            }
            // classical: the flush term does not shrink with s, so s = 1 wins
            let c1 = predict_cost(n, 1, MulBackend::Classical).total;
            let c2 = predict_cost(n, 2, MulBackend::Classical).total;
            assert!(c1 < c2);
        }
    }
}
