// SPDX-License-Identifier: Apache-2.0
//! Brute-force reference implementations for tests and audits.
//!
//! Nothing here calls into the production kernels: the only dependency is
//! [`crate::linalg`]. Series are summed in double-double arithmetic, the
//! dense exponential is a plain Taylor sum with scaling and squaring, and
//! contractions are full index loops.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::linalg::{inverse, DenseTensor, Matrix};

/// Oracle settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub series_terms: usize,
    pub fd_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { series_terms: 60, fd_step: 1e-6 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.series_terms < 20 {
            return Err(Error::InvalidArgument(format!("series_terms = {} < 20", self.series_terms)));
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 1e-3) {
            return Err(Error::InvalidArgument(format!("fd_step = {} outside (0, 1e-3]", self.fd_step)));
        }
        Ok(())
    }
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    /// Division by a double, accurate to double-double precision.
    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = Self::from_f64(q1) * Self::from_f64(d);
        let (s, e) = Self::two_sum(self.hi, -p.hi);
        let e = e - p.lo + self.lo;
        let q2 = (s + e) / d;
        let (hi, lo) = Self::quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    pub fn scale_pow2(self, s: f64) -> Self {
        Self { hi: self.hi * s, lo: self.lo * s }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let (s, e) = Self::quick_two_sum(s, e + t);
        let (hi, lo) = Self::quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = libm::fma(self.hi, o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = Self::quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// Square double-double matrix, row-major.
#[derive(Clone, Debug)]
struct DdMatrix {
    n: usize,
    a: Vec<DoubleDouble>,
}

impl DdMatrix {
    fn identity(n: usize) -> Self {
        let mut a = vec![DoubleDouble::ZERO; n * n];
        for i in 0..n {
            a[i * n + i] = DoubleDouble::ONE;
        }
        Self { n, a }
    }

    fn from_matrix(m: &Matrix) -> Self {
        Self { n: m.rows(), a: m.data().iter().map(|&x| DoubleDouble::from_f64(x)).collect() }
    }

    fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.a[i * self.n + j].to_f64())
    }

    fn mul(&self, o: &DdMatrix) -> DdMatrix {
        let n = self.n;
        let mut out = vec![DoubleDouble::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = DoubleDouble::ZERO;
                for p in 0..n {
                    s = s + self.a[i * n + p] * o.a[p * n + j];
                }
                out[i * n + j] = s;
            }
        }
        DdMatrix { n, a: out }
    }

    fn add_assign(&mut self, o: &DdMatrix) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x = *x + *y;
        }
    }

    fn div_f64(&self, d: f64) -> DdMatrix {
        DdMatrix { n: self.n, a: self.a.iter().map(|x| x.div_f64(d)).collect() }
    }

    fn scale_pow2(&self, s: f64) -> DdMatrix {
        DdMatrix { n: self.n, a: self.a.iter().map(|x| x.scale_pow2(s)).collect() }
    }
}

/// Truncated series together with a bound on the omitted tail.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Matrix,
    pub tail_bound: f64,
}

fn square_check(m: &Matrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    Ok(())
}

/// Returns `(Σ_{j<N} Xʲ/(j+1)!, Σ_{j<N} Xʲ/j!)` in double-double.
fn dd_series(x: &DdMatrix, terms: usize) -> (DdMatrix, DdMatrix) {
    let mut psi = DdMatrix::identity(x.n);
    let mut exp = DdMatrix::identity(x.n);
    // p holds Xʲ/j!.
    let mut p = DdMatrix::identity(x.n);
    for j in 1..terms {
        p = p.mul(x).div_f64(j as f64);
        exp.add_assign(&p);
        psi.add_assign(&p.div_f64((j + 1) as f64));
    }
    (psi, exp)
}

fn factorial_tail(norm: f64, terms: usize) -> f64 {
    // ‖M‖^N / (N+1)!
    let mut t = 1.0;
    for j in 1..=terms {
        t *= norm / j as f64;
    }
    t / (terms + 1) as f64
}

/// `Σ_{j<N} mʲ/(j+1)!` in double-double precision; needs `‖m‖_F ≤ 4`.
pub fn psi1_series(m: &Matrix, cfg: &OracleConfig) -> Result<SeriesValue> {
    cfg.validate()?;
    square_check(m)?;
    let norm = m.frobenius_norm();
    if norm > 4.0 {
        return Err(Error::NormTooLarge { norm, bound: 4.0 });
    }
    let (psi, _) = dd_series(&DdMatrix::from_matrix(m), cfg.series_terms);
    Ok(SeriesValue { value: psi.to_matrix(), tail_bound: factorial_tail(norm, cfg.series_terms) })
}

/// `ψ₁(m)` for larger norms: series for `ψ₁` and `exp` on `2^{-z}m` with
/// `‖2^{-z}m‖_F ≤ 1/2`, then `ψ₁(2Y) = ψ₁(Y)(e^Y + 1)/2` and `e^{2Y} = (e^Y)²`,
/// all in double-double.
pub fn psi1_scaled_series(m: &Matrix, cfg: &OracleConfig) -> Result<Matrix> {
    cfg.validate()?;
    square_check(m)?;
    if !m.is_finite() {
        return Err(Error::NonFinite("oracle input"));
    }
    let mut norm = m.frobenius_norm();
    let mut z = 0;
    while norm > 0.5 {
        norm *= 0.5;
        z += 1;
    }
    let x = DdMatrix::from_matrix(m).scale_pow2(libm::ldexp(1.0, -z));
    let (mut psi, mut exp) = dd_series(&x, cfg.series_terms);
    for _ in 0..z {
        let mut e1 = exp.clone();
        e1.add_assign(&DdMatrix::identity(m.rows()));
        psi = psi.mul(&e1).scale_pow2(0.5);
        exp = exp.mul(&exp);
    }
    Ok(psi.to_matrix())
}

/// Dense matrix exponential: Taylor sum on `2^{-s}m` (`‖·‖_F ≤ 1/8`, 20 terms)
/// followed by `s` squarings.
pub fn mexp_dense(m: &Matrix) -> Result<Matrix> {
    square_check(m)?;
    if !m.is_finite() {
        return Err(Error::NonFinite("oracle input"));
    }
    let mut norm = m.frobenius_norm();
    let mut s = 0;
    while norm > 0.125 {
        norm *= 0.5;
        s += 1;
    }
    let x = m.scale(libm::ldexp(1.0, -s));
    let n = m.rows();
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for j in 1..=20 {
        term = term.matmul(&x).scale(1.0 / j as f64);
        sum.axpy(1.0, &term);
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    Ok(sum)
}

/// `exp_g(tX) = mexp(W − Wᵀ)·mexp(Wᵀ)·g` with `W = tXg⁻¹`, factor by factor,
/// using dense `n × n` exponentials.
pub fn dense_geodesic(g: &[Matrix], x: &[Matrix], t: f64) -> Result<Vec<Matrix>> {
    if g.len() != x.len() {
        return Err(Error::DimensionMismatch(format!("{} group factors, {} tangent factors", g.len(), x.len())));
    }
    g.iter()
        .zip(x)
        .map(|(gi, xi)| {
            if gi.shape() != xi.shape() {
                return Err(Error::DimensionMismatch("group and tangent factor sizes".into()));
            }
            let w = xi.matmul(&inverse(gi)?).scale(t);
            let wt = w.transpose();
            let skew = &w - &wt;
            Ok(mexp_dense(&skew)?.matmul(&mexp_dense(&wt)?).matmul(gi))
        })
        .collect()
}

fn check_factors(fs: &[Matrix], what: &str) -> Result<()> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument(format!("{what}: no factors")));
    }
    Ok(())
}

/// `Σ_j v₁ʲ ⊗ … ⊗ v_dʲ` over the columns of the factor matrices.
pub fn contract_cp(v: &[Matrix]) -> Result<DenseTensor> {
    check_factors(v, "contract_cp")?;
    let r = v[0].cols();
    if v.iter().any(|f| f.cols() != r) {
        return Err(Error::DimensionMismatch("factor matrices with different column counts".into()));
    }
    let shape: Vec<usize> = v.iter().map(|f| f.rows()).collect();
    DenseTensor::from_fn(shape, |idx| {
        (0..r).map(|j| idx.iter().zip(v).map(|(&a, f)| f[(a, j)]).product::<f64>()).sum()
    })
}

/// `Σ_β C[β] Π_i G_i[a_i, β_i]`.
pub fn contract_tucker(c: &DenseTensor, g: &[Matrix]) -> Result<DenseTensor> {
    check_factors(g, "contract_tucker")?;
    if g.len() != c.order() || g.iter().zip(c.shape()).any(|(gi, &t)| gi.cols() != t) {
        return Err(Error::DimensionMismatch("core and factor matrices".into()));
    }
    let shape: Vec<usize> = g.iter().map(|f| f.rows()).collect();
    let core_shape = c.shape().to_vec();
    DenseTensor::from_fn(shape, |idx| {
        let mut beta = vec![0usize; core_shape.len()];
        let mut s = 0.0;
        for &cv in c.data() {
            if cv != 0.0 {
                s += cv * idx.iter().zip(&beta).zip(g).map(|((&a, &b), f)| f[(a, b)]).product::<f64>();
            }
            crate::linalg::tensor_increment(&mut beta, &core_shape);
        }
        s
    })
}

/// Tensor-train contraction of unfolded cores `F_i` (`n_i × s_{i−1}s_i`,
/// column index `(α_{i−1}, α_i)` row-major, `s₀ = s_d = 1`).
pub fn contract_tt(f: &[Matrix]) -> Result<DenseTensor> {
    check_factors(f, "contract_tt")?;
    let d = f.len();
    let mut s = vec![1usize; d + 1];
    for i in 0..d - 1 {
        if f[i].cols() % s[i] != 0 {
            return Err(Error::DimensionMismatch(format!("core {i} width {} not a multiple of {}", f[i].cols(), s[i])));
        }
        s[i + 1] = f[i].cols() / s[i];
    }
    if f[d - 1].cols() != s[d - 1] {
        return Err(Error::DimensionMismatch("last core width".into()));
    }
    let shape: Vec<usize> = f.iter().map(|m| m.rows()).collect();
    DenseTensor::from_fn(shape, |idx| {
        let mut v = vec![1.0];
        for i in 0..d {
            let sr = s[i + 1];
            let mut w = vec![0.0; sr];
            for (a, &va) in v.iter().enumerate() {
                for (b, wb) in w.iter_mut().enumerate() {
                    *wb += va * f[i][(idx[i], a * sr + b)];
                }
            }
            v = w;
        }
        v[0]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_arithmetic() {
        let third = DoubleDouble::ONE.div_f64(3.0);
        let back = third * DoubleDouble::from_f64(3.0);
        assert!((back.hi - 1.0).abs() + back.lo.abs() < 1e-31);
    }

    #[test]
    fn scalar_series() {
        let cfg = OracleConfig::default();
        let h = psi1_series(&Matrix::from_rows(&[&[0.5]]), &cfg).unwrap();
        assert_eq!(h.value[(0, 0)], 1.2974425414002564);
        assert!(h.tail_bound < 1e-60);
        let z = psi1_series(&Matrix::zeros(2, 2), &cfg).unwrap();
        assert_eq!(z.value, Matrix::identity(2));
        let two = psi1_scaled_series(&Matrix::from_rows(&[&[2.0]]), &cfg).unwrap();
        assert!((two[(0, 0)] - 3.194528049465325).abs() < 5e-16);
    }

    #[test]
    fn dense_exponential() {
        let nil = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(mexp_dense(&nil).unwrap(), Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]));
        assert_eq!(mexp_dense(&Matrix::zeros(3, 3)).unwrap(), Matrix::identity(3));
        let e = mexp_dense(&Matrix::from_rows(&[&[3.0]])).unwrap();
        assert!((e[(0, 0)] / libm::exp(3.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_geodesic() {
        let (a, v, t) = (1.5, -0.4, 2.0);
        let g = [Matrix::from_rows(&[&[a]])];
        let x = [Matrix::from_rows(&[&[v]])];
        let out = dense_geodesic(&g, &x, t).unwrap();
        assert!((out[0][(0, 0)] - libm::exp(t * v / a) * a).abs() < 1e-14);
        assert_eq!(dense_geodesic(&g, &x, 0.0).unwrap()[0], g[0]);
    }

    #[test]
    fn rank_one_contractions() {
        let a = Matrix::from_rows(&[&[1.0], &[2.0]]);
        let b = Matrix::from_rows(&[&[3.0], &[-1.0], &[0.5]]);
        let t = contract_cp(&[a.clone(), b.clone(), a.clone()]).unwrap();
        assert_eq!(t.get(&[1, 2, 1]), 2.0 * 0.5 * 2.0);
        let tt = contract_tt(&[a.clone(), b.clone(), a.clone()]).unwrap();
        assert_eq!(tt, t);
        let core = DenseTensor::new(vec![1, 1, 1], vec![1.0]).unwrap();
        assert_eq!(contract_tucker(&core, &[a.clone(), b, a]).unwrap(), t);
    }
}
