// SPDX-License-Identifier: Apache-2.0
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &Matrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
        _ => 0,
    }
}

/// `σ_max / σ_min` over the `min(rows, cols)` singular values.
pub fn condition_number(m: &Matrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis (as columns) of the orthogonal complement of the column
/// space of a full-column-rank `f`.
pub fn orthonormal_complement(f: &Matrix) -> Result<Matrix> {
    let (n, k) = f.shape();
    if k > n {
        return Err(Error::DimensionMismatch(format!("{n}x{k} frame has more columns than rows")));
    }
    if numerical_rank(f, super::RANK_TOL) < k {
        return Err(Error::RankDeficient(format!("{n}x{k} frame")));
    }
    let qr = f.to_nalgebra().qr();
    let mut q = nalgebra::DMatrix::<f64>::identity(n, n);
    qr.q_tr_mul(&mut q);
    // q now holds Qᵀ; its trailing rows are the complement directions.
    Ok(Matrix::from_fn(n, n - k, |i, j| q[(k + j, i)]))
}
