// SPDX-License-Identifier: Apache-2.0
use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{decomp, Matrix, Permutation, RANK_TOL};

/// Row permutation `P` such that the leading `r × r` block of `P·m` is
/// well inside the invertible set, by greedy rook-pivoted elimination.
///
/// Rejects inputs whose elimination meets a pivot below `1e-10·max|m|`.
pub fn select_submatrix(m: &Matrix) -> Result<Permutation> {
    pivot_rows(m, RANK_TOL).map(|(p, _)| p)
}

/// Rook-pivoted elimination on the rows of an `n × r` matrix (`r ≤ n`).
///
/// Returns the row permutation and the number of flops spent in the
/// elimination updates. A pivot of magnitude `≤ rel_tol · max|m|` is an
/// error; `rel_tol = 0` only rejects exact zeros.
pub fn pivot_rows(m: &Matrix, rel_tol: f64) -> Result<(Permutation, usize)> {
    let (n, r) = m.shape();
    if r > n {
        return Err(Error::DimensionMismatch(format!("cannot select {r} rows out of {n}")));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("submatrix selection"));
    }
    let scale = m.max_abs();
    let mut w = m.clone();
    let mut perm = Permutation::identity(n);
    let mut flops = 0usize;
    for j in 0..r {
        // Alternate column and row maxima until the entry dominates both.
        let mut col = j;
        let mut row = argmax_in_col(&w, col, j);
        loop {
            let c2 = argmax_in_row(&w, row, j);
            if w[(row, c2)].abs() <= w[(row, col)].abs() {
                break;
            }
            col = c2;
            let r2 = argmax_in_col(&w, col, j);
            if w[(r2, col)].abs() <= w[(row, col)].abs() {
                break;
            }
            row = r2;
        }
        let piv = w[(row, col)];
        if piv == 0.0 || piv.abs() <= rel_tol * scale {
            return Err(Error::RankDeficient(format!(
                "{n}x{r} matrix has numerical column rank {j}"
            )));
        }
        w.swap_rows(row, j);
        perm.swap(row, j);
        if col != j {
            for i in 0..n {
                w.data_mut().swap(i * r + col, i * r + j);
            }
        }
        for i in j + 1..n {
            let f = w[(i, j)] / piv;
            if f != 0.0 {
                for c in j + 1..r {
                    let u = w[(j, c)];
                    w[(i, c)] -= f * u;
                }
            }
            w[(i, j)] = 0.0;
        }
        flops += 2 * (n - j - 1) * (r - j - 1);
    }
    Ok((perm, flops))
}

fn argmax_in_col(w: &Matrix, col: usize, from: usize) -> usize {
    let mut best = from;
    for i in from + 1..w.rows() {
        if w[(i, col)].abs() > w[(best, col)].abs() {
            best = i;
        }
    }
    best
}

fn argmax_in_row(w: &Matrix, row: usize, from: usize) -> usize {
    let mut best = from;
    for c in from + 1..w.cols() {
        if w[(row, c)].abs() > w[(row, best)].abs() {
            best = c;
        }
    }
    best
}

/// Columns completing `f` to an invertible matrix: an orthonormal basis of
/// the complement of its column space, each column signed so that its
/// largest entry is positive.
pub fn basis_completion(f: &Matrix) -> Result<Matrix> {
    let mut c = decomp::orthonormal_complement(f)?;
    for j in 0..c.cols() {
        let mut best = 0;
        for i in 0..c.rows() {
            if c[(i, j)].abs() > c[(best, j)].abs() + 1e-12 {
                best = i;
            }
        }
        if c[(best, j)] < 0.0 {
            for i in 0..c.rows() {
                c[(i, j)] = -c[(i, j)];
            }
        }
    }
    Ok(c)
}
