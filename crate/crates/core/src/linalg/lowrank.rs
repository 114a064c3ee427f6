// SPDX-License-Identifier: Apache-2.0
use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// The `n × n` product `left · right` of an `n × k` and a `k × n` factor,
/// kept in factored form.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankPair {
    left: Matrix,
    right: Matrix,
}

impl LowRankPair {
    pub fn new(left: Matrix, right: Matrix) -> Result<Self> {
        if left.cols() != right.rows() || left.rows() != right.cols() {
            return Err(Error::DimensionMismatch(format!(
                "low-rank pair {}x{} · {}x{}",
                left.rows(),
                left.cols(),
                right.rows(),
                right.cols()
            )));
        }
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::NonFinite("low-rank pair"));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &Matrix {
        &self.left
    }
    pub fn right(&self) -> &Matrix {
        &self.right
    }
    /// Ambient size `n`.
    pub fn n(&self) -> usize {
        self.left.rows()
    }
    /// Inner rank `k`.
    pub fn k(&self) -> usize {
        self.left.cols()
    }

    /// Forms the `n × n` product. Test and oracle use only.
    pub fn densify(&self) -> Matrix {
        self.left.matmul(&self.right)
    }
}
