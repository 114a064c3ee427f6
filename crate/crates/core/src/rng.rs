// SPDX-License-Identifier: Apache-2.0
//! Seeded random sources for samplers and test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard normal entries.
pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `I + scale·N(0,1)/√n`: invertible with high probability and modest
/// condition number for `scale ≲ 0.5`.
pub fn near_identity(rng: &mut impl Rng, n: usize, scale: f64) -> Matrix {
    let mut m = gaussian(rng, n, n).scale(scale / libm::sqrt(n as f64));
    m.add_diagonal(1.0);
    m
}

/// Uniform value in `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
