//! Seeded test-matrix generators.
//!
//! Both generators draw from SplitMix64 seeded with `seed`, converting each
//! 64-bit output `x` to `u = (x >> 11) * 2^-53` in `[0, 1)`. Draws are taken in
//! row-major order over the entries listed below, so the output is fixed for
//! a given `(n, seed)` on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::Result;
use crate::matrix::Matrix;

struct Uniform(SplitMix64);

impl Uniform {
    fn new(seed: u64) -> Self {
        Uniform(SplitMix64::seed_from_u64(seed))
    }

    /// `[0, 1)`
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `[-1, 1)`
    fn signed(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }
}

/// Symmetric, strictly diagonally dominant (hence positive-definite) matrix.
///
/// Walks the upper triangle row by row: diagonal entries get `n + U[0,1)`,
/// off-diagonal entries `U[-1,1)` mirrored into the lower triangle.
pub fn gen_spd(n: usize, seed: u64) -> Result<Matrix> {
    let mut a = Matrix::zeros(n, n)?;
    let mut rng = Uniform::new(seed);
    for i in 0..n {
        a[(i, i)] = n as f64 + rng.unit();
        for j in i + 1..n {
            let v = rng.signed();
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(a)
}

/// Nonsymmetric matrix with `U[-1,1)` entries and `+n` on the diagonal, so
/// every leading principal minor is nonzero.
pub fn gen_general(n: usize, seed: u64) -> Result<Matrix> {
    let mut a = Matrix::zeros(n, n)?;
    let mut rng = Uniform::new(seed);
    for v in a.as_mut_slice() {
        *v = rng.signed();
    }
    for i in 0..n {
        a[(i, i)] += n as f64;
    }
    Ok(a)
}

/// Dense `rows x cols` matrix of `U[-1,1)` entries.
pub fn gen_uniform(rows: usize, cols: usize, seed: u64) -> Result<Matrix> {
    let mut a = Matrix::zeros(rows, cols)?;
    let mut rng = Uniform::new(seed);
    for v in a.as_mut_slice() {
        *v = rng.signed();
    }
    Ok(a)
}
