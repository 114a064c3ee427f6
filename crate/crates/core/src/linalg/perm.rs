// SPDX-License-Identifier: Apache-2.0
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A bijection of `{0, …, size−1}`.
///
/// Acting on rows, `P·m` has row `j` equal to row `image[j]` of `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).collect() }
    }

    pub fn from_vec(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = alloc::vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument(format!("{image:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.len()];
        for (j, &i) in self.image.iter().enumerate() {
            inv[i] = j;
        }
        Self { image: inv }
    }

    /// `self ∘ other` as row operators: applying the result equals applying
    /// `other` first, then `self`.
    pub fn then_after(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len());
        Self { image: self.image.iter().map(|&j| other.image[j]).collect() }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.image.swap(a, b);
    }

    /// Dense permutation matrix `P` with `P[j, image[j]] = 1`.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.len(), self.len());
        for (j, &i) in self.image.iter().enumerate() {
            m[(j, i)] = 1.0;
        }
        m
    }
}
