// SPDX-License-Identifier: Apache-2.0
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Fails only on an exactly zero or non-finite pivot; conditioning is the
    /// caller's concern.
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of a {}x{} matrix", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for j in 0..n {
            let mut p = j;
            let mut best = lu[(j, j)].abs();
            for i in j + 1..n {
                let v = lu[(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular("LU factorization"));
            }
            if p != j {
                lu.swap_rows(p, j);
                piv.swap(p, j);
                sign = -sign;
            }
            let d = lu[(j, j)];
            for i in j + 1..n {
                let f = lu[(i, j)] / d;
                lu[(i, j)] = f;
                if f != 0.0 {
                    for c in j + 1..n {
                        let u = lu[(j, c)];
                        lu[(i, c)] -= f * u;
                    }
                }
            }
        }
        Ok(Self { lu, piv, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    /// Smallest and largest |U| diagonal entries.
    pub fn pivot_range(&self) -> (f64, f64) {
        (0..self.dim()).fold((f64::INFINITY, 0.0), |(lo, hi), i| {
            let v = self.lu[(i, i)].abs();
            (lo.min(v), hi.max(v))
        })
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!("solve with {n}x{n} and {} rows", b.rows())));
        }
        let m = b.cols();
        let mut x = Matrix::zeros(n, m);
        for (i, &p) in self.piv.iter().enumerate() {
            x.row_mut(i).copy_from_slice(b.row(p));
        }
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l != 0.0 {
                    for c in 0..m {
                        let v = x[(k, c)];
                        x[(i, c)] -= l * v;
                    }
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u != 0.0 {
                    for c in 0..m {
                        let v = x[(k, c)];
                        x[(i, c)] -= u * v;
                    }
                }
            }
            let d = self.lu[(i, i)];
            for c in 0..m {
                x[(i, c)] /= d;
            }
        }
        Ok(x)
    }

    /// Solves `Aᵀ X = B`.
    pub fn solve_transpose(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!("solve with {n}x{n} and {} rows", b.rows())));
        }
        let m = b.cols();
        // Aᵀ = Uᵀ Lᵀ P: forward with Uᵀ, backward with Lᵀ, then undo P.
        let mut y = b.clone();
        for i in 0..n {
            for k in 0..i {
                let u = self.lu[(k, i)];
                if u != 0.0 {
                    for c in 0..m {
                        let v = y[(k, c)];
                        y[(i, c)] -= u * v;
                    }
                }
            }
            let d = self.lu[(i, i)];
            for c in 0..m {
                y[(i, c)] /= d;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let l = self.lu[(k, i)];
                if l != 0.0 {
                    for c in 0..m {
                        let v = y[(k, c)];
                        y[(i, c)] -= l * v;
                    }
                }
            }
        }
        let mut x = Matrix::zeros(n, m);
        for (i, &p) in self.piv.iter().enumerate() {
            x.row_mut(p).copy_from_slice(y.row(i));
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Matrix {
        self.solve(&Matrix::identity(self.dim())).expect("square identity right-hand side")
    }
}

/// `a⁻¹`, uncharged.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Ok(Lu::factor(a)?.inverse())
}
