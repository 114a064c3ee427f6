// SPDX-License-Identifier: Apache-2.0
//! Tensors of multilinear rank `(t₁, …, t_d)` with `t₁ = t₂⋯t_d`.
//!
//! Mode 1 is the large mode. Callers whose large mode sits elsewhere must
//! permute the modes first.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gl::GroupElement;
use crate::homogeneous::{
    check_dims, check_factor, geodesic_flop_formula, HomogeneousShape, Point, Tangent,
};
use crate::linalg::{inverse, DenseTensor, Matrix};
use crate::rng::{gaussian, near_identity, seeded, TestRng};

/// Admissible range of `t₁` for given `t₂, …, t_d`:
/// `((p + √(p² − 4Σtᵢ²))/2, p)` rounded inward, `p = t₂⋯t_d`.
/// `None` when the discriminant is negative.
pub fn tucker_rank_window(rest: &[usize]) -> Option<(usize, usize)> {
    let p: usize = rest.iter().product();
    let s: usize = rest.iter().map(|t| t * t).sum();
    let disc = (p * p) as f64 - 4.0 * s as f64;
    if disc < 0.0 {
        return None;
    }
    let lo = libm::ceil((p as f64 + libm::sqrt(disc)) / 2.0) as usize;
    Some((lo, p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuckerShape {
    dims: Vec<usize>,
    ranks: Vec<usize>,
}

impl TuckerShape {
    pub fn new(dims: Vec<usize>, ranks: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        if ranks.len() != dims.len() {
            return Err(Error::InvalidShape(format!("{} ranks for {} modes", ranks.len(), dims.len())));
        }
        if ranks.iter().zip(&dims).any(|(&t, &n)| t == 0 || t > n) {
            return Err(Error::InvalidShape(format!("ranks {ranks:?} must satisfy 1 ≤ tᵢ ≤ nᵢ for dims {dims:?}")));
        }
        let p: usize = ranks[1..].iter().product();
        if ranks[0] != p {
            let window = match tucker_rank_window(&ranks[1..]) {
                Some((lo, hi)) => format!("{lo} ≤ t₁ ≤ {hi}"),
                None => "empty".into(),
            };
            return Err(Error::InvalidShape(format!(
                "only t₁ = t₂⋯t_d = {p} is supported, got t₁ = {} (admissible window {window})",
                ranks[0]
            )));
        }
        Ok(Self { dims, ranks })
    }
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
}

/// Partial trace of `l` over every factor of `ℝ^{f₀}⊗…` except `keep`.
pub(crate) fn partial_trace(l: &Matrix, factors: &[usize], keep: usize) -> Matrix {
    let tk = factors[keep];
    let mut out = Matrix::zeros(tk, tk);
    let mut idx = alloc::vec![0usize; factors.len()];
    let flat = |idx: &[usize]| idx.iter().zip(factors).fold(0, |acc, (&i, &f)| acc * f + i);
    let total: usize = factors.iter().product();
    for _ in 0..total {
        if idx[keep] == 0 {
            for c in 0..tk {
                for d in 0..tk {
                    let mut a = idx.clone();
                    a[keep] = c;
                    let mut b = idx.clone();
                    b[keep] = d;
                    out[(c, d)] += l[(flat(&a), flat(&b))];
                }
            }
        }
        crate::linalg::tensor_increment(&mut idx, factors);
    }
    out
}

impl HomogeneousShape for TuckerShape {
    fn tag(&self) -> &'static str {
        "tucker"
    }
    fn dims(&self) -> &[usize] {
        &self.dims
    }
    fn leading(&self) -> Vec<usize> {
        self.ranks.clone()
    }
    /// Mode-1 unfolding equal to the identity.
    fn reference_core(&self) -> DenseTensor {
        let t1 = self.ranks[0];
        let id = Matrix::identity(t1);
        DenseTensor::fold(&id, self.ranks.clone(), 0).expect("t₁ = t₂⋯t_d")
    }
    fn stabilizer_topleft_basis(&self) -> Vec<Vec<Matrix>> {
        let rest = &self.ranks[1..];
        let mut out = Vec::new();
        for i in 1..self.ranks.len() {
            let t = self.ranks[i];
            for a in 0..t {
                for b in 0..t {
                    let mut blocks: Vec<Matrix> = self.ranks.iter().map(|&k| Matrix::zeros(k, k)).collect();
                    blocks[i][(a, b)] = 1.0;
                    let mut e = Matrix::zeros(t, t);
                    e[(b, a)] = 1.0;
                    let kr = rest.iter().enumerate().fold(Matrix::identity(1), |acc, (j, &tj)| {
                        Matrix::kron(&acc, &if j + 1 == i { e.clone() } else { Matrix::identity(tj) })
                    });
                    blocks[0] = kr.scale(-1.0);
                    out.push(blocks);
                }
            }
        }
        out
    }
    /// `Lᵢ = trᵢ L₁`, the partial trace transposed.
    fn complement_residual(&self, blocks: &[Matrix]) -> f64 {
        let rest = &self.ranks[1..];
        (1..self.ranks.len())
            .map(|i| (&blocks[i] - &partial_trace(&blocks[0], rest, i - 1).transpose()).max_abs())
            .fold(0.0, f64::max)
    }
    fn sample_stabilizer(&self, rng: &mut TestRng, off_diagonal: bool) -> GroupElement {
        TuckerStabilizerSample::random(self, rng, off_diagonal).assemble()
    }
}

pub type TuckerPoint = Point<TuckerShape>;
pub type TuckerTangent = Tangent;

/// Point represented by `C ×₁ G₁ ×₂ … ×_d G_d`.
pub fn tucker_point_from_decomposition(core: &DenseTensor, factors: &[Matrix]) -> Result<TuckerPoint> {
    if factors.len() != core.order() || factors.iter().zip(core.shape()).any(|(g, &t)| g.cols() != t) {
        return Err(Error::DimensionMismatch(format!("core {:?} and factor widths disagree", core.shape())));
    }
    let shape = TuckerShape::new(factors.iter().map(Matrix::rows).collect(), core.shape().to_vec())?;
    let c1 = core.unfold(0)?;
    check_factor(&c1, "mode-1 core unfolding")?;
    for (i, g) in factors.iter().enumerate() {
        check_factor(g, &format!("Tucker factor {}", i + 1))?;
    }
    let mut cols = factors.to_vec();
    cols[0] = factors[0].matmul(&c1);
    Point::from_columns(shape, &cols)
}

/// Element of the stabilizer: modes `i ≥ 2` carry `Aᵢ`, mode 1 carries
/// `A₂⁻ᵀ ⊗ … ⊗ A_d⁻ᵀ`, plus off-diagonal `Mᵢ` and lower-right `Bᵢ` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct TuckerStabilizerSample {
    /// `A₂, …, A_d`.
    pub a: Vec<Matrix>,
    pub m: Vec<Matrix>,
    pub b: Vec<Matrix>,
}

impl TuckerStabilizerSample {
    pub fn identity(shape: &TuckerShape) -> Self {
        Self {
            a: shape.ranks[1..].iter().map(|&t| Matrix::identity(t)).collect(),
            m: shape.dims.iter().zip(&shape.ranks).map(|(&n, &t)| Matrix::zeros(t, n - t)).collect(),
            b: shape.dims.iter().zip(&shape.ranks).map(|(&n, &t)| Matrix::identity(n - t)).collect(),
        }
    }

    pub fn sample(shape: &TuckerShape, seed: u64) -> Self {
        Self::random(shape, &mut seeded(seed), true)
    }

    pub fn random(shape: &TuckerShape, rng: &mut TestRng, off_diagonal: bool) -> Self {
        let a = shape.ranks[1..].iter().map(|&t| near_identity(rng, t, 0.5)).collect();
        let m = shape
            .dims
            .iter()
            .zip(&shape.ranks)
            .map(|(&n, &t)| if off_diagonal { gaussian(rng, t, n - t) } else { Matrix::zeros(t, n - t) })
            .collect();
        let b = shape.dims.iter().zip(&shape.ranks).map(|(&n, &t)| near_identity(rng, n - t, 0.3)).collect();
        Self { a, m, b }
    }

    /// `A₂⁻ᵀ ⊗ … ⊗ A_d⁻ᵀ`.
    pub fn mode1_block(&self) -> Result<Matrix> {
        self.a.iter().try_fold(Matrix::identity(1), |acc, a| Ok(Matrix::kron(&acc, &inverse(a)?.transpose())))
    }

    pub fn assemble(&self) -> GroupElement {
        let mut tops = alloc::vec![self.mode1_block().expect("invertible Aᵢ")];
        tops.extend(self.a.iter().cloned());
        let factors = tops
            .iter()
            .zip(self.m.iter().zip(&self.b))
            .map(|(top, (m, b))| {
                let t = top.rows();
                let n = t + b.rows();
                let mut h = Matrix::zeros(n, n);
                h.set_block(0, 0, top);
                h.set_block(0, t, m);
                h.set_block(t, t, b);
                h
            })
            .collect();
        GroupElement::new(factors).expect("invertible stabilizer sample")
    }
}

/// `Σᵢ 110nᵢtᵢ²/3 + (146 + 36zᵢ)tᵢ³`.
pub fn tucker_flop_formula(shape: &TuckerShape, z: &[u32]) -> Result<Ratio<i128>> {
    if z.len() != shape.dims.len() {
        return Err(Error::DimensionMismatch(format!("{} exponents for {} modes", z.len(), shape.dims.len())));
    }
    Ok(geodesic_flop_formula(&shape.dims, &shape.ranks, z))
}
