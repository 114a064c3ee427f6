// SPDX-License-Identifier: Apache-2.0
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{decomp, Matrix};

/// Dense row-major tensor (last index fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for shape {shape:?}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("tensor data"));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        check_shape(&shape)?;
        let len = shape.iter().product();
        Ok(Self { shape, data: vec![0.0; len] })
    }

    /// Tensor with entry `f(index)` at every multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(shape)?;
        let mut idx = vec![0usize; t.order()];
        for v in t.data.iter_mut() {
            *v = f(&idx);
            increment(&mut idx, &t.shape);
        }
        Ok(t)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
    pub fn order(&self) -> usize {
        self.shape.len()
    }
    pub fn len(&self) -> usize {
        self.data.len()
    }
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.order(), "index order");
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| {
            assert!(i < n, "index out of range");
            acc * n + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        let m = Matrix::from_vec(1, self.len(), self.data.clone()).expect("finite data");
        m.frobenius_norm()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &DenseTensor) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        let diff: Vec<f64> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix::from_vec(1, diff.len(), diff)?.frobenius_norm())
    }

    fn split(&self, mode: usize) -> (usize, usize, usize) {
        let pre = self.shape[..mode].iter().product();
        let post = self.shape[mode + 1..].iter().product();
        (pre, self.shape[mode], post)
    }

    /// Mode-`mode` unfolding (0-based): `n_mode × ∏_{j≠mode} n_j`, columns
    /// enumerating the other modes in row-major order.
    pub fn unfold(&self, mode: usize) -> Result<Matrix> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange { mode, order: self.order() });
        }
        let (pre, n, post) = self.split(mode);
        let mut m = Matrix::zeros(n, pre * post);
        for p in 0..pre {
            for a in 0..n {
                let src = &self.data[(p * n + a) * post..(p * n + a + 1) * post];
                m.row_mut(a)[p * post..(p + 1) * post].copy_from_slice(src);
            }
        }
        Ok(m)
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(m: &Matrix, shape: Vec<usize>, mode: usize) -> Result<Self> {
        let mut t = Self::zeros(shape)?;
        if mode >= t.order() {
            return Err(Error::ModeOutOfRange { mode, order: t.order() });
        }
        let (pre, n, post) = t.split(mode);
        if m.shape() != (n, pre * post) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot fold into {:?} along mode {mode}",
                m.rows(),
                m.cols(),
                t.shape
            )));
        }
        for p in 0..pre {
            for a in 0..n {
                t.data[(p * n + a) * post..(p * n + a + 1) * post]
                    .copy_from_slice(&m.row(a)[p * post..(p + 1) * post]);
            }
        }
        Ok(t)
    }

    /// Same data, new shape.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self> {
        Self::new(shape, self.data.clone())
    }

    /// `self ×_mode m`: `out[.., a, ..] = Σ_b m[a, b] · self[.., b, ..]`.
    pub fn mode_product(&self, mode: usize, m: &Matrix) -> Result<Self> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange { mode, order: self.order() });
        }
        let (pre, n, post) = self.split(mode);
        if m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "mode-{mode} product of a {}x{} matrix with extent {n}",
                m.rows(),
                m.cols()
            )));
        }
        let rows = m.rows();
        let mut shape = self.shape.clone();
        shape[mode] = rows;
        let mut out = vec![0.0; pre * rows * post];
        for p in 0..pre {
            for a in 0..rows {
                let dst = &mut out[(p * rows + a) * post..(p * rows + a + 1) * post];
                for b in 0..n {
                    let w = m[(a, b)];
                    if w == 0.0 {
                        continue;
                    }
                    let src = &self.data[(p * n + b) * post..(p * n + b + 1) * post];
                    for (o, s) in dst.iter_mut().zip(src) {
                        *o += w * s;
                    }
                }
            }
        }
        Ok(Self { shape, data: out })
    }

    /// `self ×₁ m₁ ×₂ … ×_d m_d`.
    pub fn multilinear_product(&self, ms: &[Matrix]) -> Result<Self> {
        if ms.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors for an order-{} tensor",
                ms.len(),
                self.order()
            )));
        }
        // Shrinking modes first keeps intermediates small.
        let mut order: Vec<usize> = (0..ms.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = ms[a].rows() as f64 / ms[a].cols() as f64;
            let rb = ms[b].rows() as f64 / ms[b].cols() as f64;
            ra.total_cmp(&rb)
        });
        let mut t = self.clone();
        for i in order {
            t = t.mode_product(i, &ms[i])?;
        }
        Ok(t)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|x| s * x).collect() }
    }

    pub fn add(&self, other: &DenseTensor) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { shape: self.shape.clone(), data })
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::InvalidShape(format!("{shape:?}: need at least one mode, all extents positive")));
    }
    Ok(())
}

/// Advances a row-major multi-index; wraps to all zeros after the last one.
pub fn increment(idx: &mut [usize], shape: &[usize]) {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < shape[i] {
            return;
        }
        idx[i] = 0;
    }
}

/// Numerical ranks of all mode unfoldings.
pub fn multilinear_rank(t: &DenseTensor, tol: f64) -> Vec<usize> {
    (0..t.order())
        .map(|i| decomp::numerical_rank(&t.unfold(i).expect("mode in range"), tol))
        .collect()
}

/// Numerical ranks of the sequential splits `n₁⋯n_i × n_{i+1}⋯n_d`.
pub fn tt_rank(t: &DenseTensor, tol: f64) -> Vec<usize> {
    let total = t.len();
    let mut rows = 1;
    (0..t.order() - 1)
        .map(|i| {
            rows *= t.shape()[i];
            let m = Matrix::from_vec(rows, total / rows, t.data().to_vec()).expect("finite data");
            decomp::numerical_rank(&m, tol)
        })
        .collect()
}
