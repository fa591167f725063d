//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` rather than exceptions so the page can show them.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use panelfact::decomp::{DecompStats, FixedWidth};
use panelfact::generate::{gen_general, gen_spd};
use panelfact::matmul::mul_strassen_square;
use panelfact::policy::block_cost;
use panelfact::report::{factorize, verify};
use panelfact::{predict_cost, Kind, MulBackend, OpCount};

/// Largest order the page may factor.
pub const MAX_N: usize = 256;
/// Largest order for which factor entries are sent back.
pub const MAX_SHOWN: usize = 96;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| error(&e.to_string()))
}

fn error(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

#[derive(Serialize)]
struct CostPoint {
    s: usize,
    classical: u64,
    strassen: u64,
    strassen_panel: u64,
    strassen_flush: u64,
}

#[derive(Serialize)]
struct CostCurve {
    n: usize,
    depth: u32,
    points: Vec<CostPoint>,
    best_classical: usize,
    best_strassen: usize,
}

/// Predicted operation totals against panel width for order `n`: the
/// classical model and Strassen at `depth`. Widths are sampled on a
/// roughly geometric grid that always includes 1 and `n`.
#[wasm_bindgen]
pub fn cost_curve(n: usize, depth: u32) -> String {
    if n == 0 || n > 1 << 16 {
        return error("n must be between 1 and 65536");
    }
    let mut widths: Vec<usize> = (0..=64)
        .map(|i| (n as f64).powf(i as f64 / 64.0).round() as usize)
        .collect();
    widths.dedup();
    let strassen = MulBackend::strassen(depth);
    let points: Vec<CostPoint> = widths
        .into_iter()
        .map(|s| {
            let st = predict_cost(n, s, strassen);
            CostPoint {
                s,
                classical: predict_cost(n, s, MulBackend::Classical).total,
                strassen: st.total,
                strassen_panel: st.panel_ops,
                strassen_flush: st.flush_ops,
            }
        })
        .collect();
    let best =
        |f: fn(&CostPoint) -> u64| points.iter().min_by_key(|p| (f(p), p.s)).map_or(1, |p| p.s);
    let (best_classical, best_strassen) = (best(|p| p.classical), best(|p| p.strassen));
    to_json(&CostCurve {
        n,
        depth,
        points,
        best_classical,
        best_strassen,
    })
}

#[derive(Serialize)]
struct FactorView {
    kind: &'static str,
    n: usize,
    s: usize,
    depth: u32,
    flushes: usize,
    flush_at: Vec<usize>,
    panel: OpCount,
    flush: OpCount,
    finish: OpCount,
    residual_rel: f64,
    orth_rel: Option<f64>,
    /// Row-major entries of each factor, omitted above [`MAX_SHOWN`].
    factors: Vec<Vec<f64>>,
    names: Vec<&'static str>,
}

/// Factors a seeded test matrix (SPD for Cholesky, diagonally weighted
/// otherwise) and reports counts, flush columns, residuals and entries.
#[wasm_bindgen]
pub fn factor(kind: &str, n: usize, s: usize, depth: u32, seed: u32) -> String {
    let kind: Kind = match kind.parse() {
        Ok(k) => k,
        Err(e) => return error(&e),
    };
    if n == 0 || n > MAX_N {
        return error(&format!("n must be between 1 and {MAX_N}"));
    }
    if s == 0 || s > n {
        return error("s must be between 1 and n");
    }
    let backend = if depth == 0 {
        MulBackend::Classical
    } else {
        MulBackend::strassen(depth)
    };
    let a = match kind {
        Kind::Cholesky => gen_spd(n, seed.into()),
        _ => gen_general(n, seed.into()),
    };
    let run = a.and_then(|a| {
        let mut stats = DecompStats::default();
        let f = factorize(kind, &a, &FixedWidth(s), backend, &mut stats)?;
        let v = verify(&a, &f)?;
        Ok((f, stats, v))
    });
    let (f, stats, v) = match run {
        Ok(r) => r,
        Err(e) => return error(&e.to_string()),
    };
    let factors = if n <= MAX_SHOWN {
        f.matrices().iter().map(|m| m.as_slice().to_vec()).collect()
    } else {
        Vec::new()
    };
    to_json(&FactorView {
        kind: kind.name(),
        n,
        s,
        depth,
        flushes: stats.flushes,
        flush_at: stats.flush_at,
        panel: stats.panel,
        flush: stats.flush,
        finish: stats.finish,
        residual_rel: v.residual_rel,
        orth_rel: v.orth_rel,
        names: kind.factor_names().to_vec(),
        factors,
    })
}

#[derive(Serialize)]
struct DepthRow {
    depth: u32,
    mults: u64,
    adds: u64,
    predicted: OpCount,
}

/// Measured and predicted scalar counts of one `n x n` product for each
/// depth `0..=max_depth`.
#[wasm_bindgen]
pub fn strassen_counts(n: usize, max_depth: u32) -> String {
    if n == 0 || n > 512 || max_depth > 8 {
        return error("n must be between 1 and 512 and depth at most 8");
    }
    let a = match gen_general(n, 1) {
        Ok(a) => a,
        Err(e) => return error(&e.to_string()),
    };
    let mut rows = Vec::new();
    for depth in 0..=max_depth {
        let mut ops = OpCount::default();
        if let Err(e) = mul_strassen_square(&a, &a, depth, &mut ops) {
            return error(&e.to_string());
        }
        rows.push(DepthRow {
            depth,
            mults: ops.mults,
            adds: ops.adds,
            predicted: block_cost(n, MulBackend::strassen(depth)),
        });
    }
    to_json(&rows)
}
