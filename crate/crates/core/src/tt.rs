// SPDX-License-Identifier: Apache-2.0
//! Tensors of TT rank `(s₁, …, s_{d−1})`.
//!
//! Core `i` is stored unfolded as an `nᵢ × sᵢ₋₁sᵢ` matrix whose column index
//! is `(αᵢ₋₁, αᵢ)` in row-major order, with `s₀ = s_d = 1`.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gl::GroupElement;
use crate::homogeneous::{check_dims, check_factor, geodesic_flop_formula, HomogeneousShape, Point, Tangent};
use crate::linalg::{inverse, DenseTensor, Matrix};
use crate::rng::{gaussian, near_identity, seeded, TestRng};
use crate::tucker::partial_trace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtShape {
    dims: Vec<usize>,
    ranks: Vec<usize>,
}

impl TtShape {
    pub fn new(dims: Vec<usize>, ranks: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        if ranks.len() + 1 != dims.len() || ranks.contains(&0) {
            return Err(Error::InvalidShape(format!("need {} positive TT ranks, got {ranks:?}", dims.len() - 1)));
        }
        let s = Self { dims, ranks };
        if let Some(i) = s.leading().iter().zip(&s.dims).position(|(k, n)| k > n) {
            return Err(Error::InvalidShape(format!(
                "mode {} needs sᵢ₋₁sᵢ = {} ≤ nᵢ = {}",
                i + 1,
                s.leading()[i],
                s.dims[i]
            )));
        }
        Ok(s)
    }
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
    /// `(sᵢ₋₁, sᵢ)` for mode `i` (0-based), with unit boundary ranks.
    fn bond(&self, i: usize) -> (usize, usize) {
        let d = self.dims.len();
        let left = if i == 0 { 1 } else { self.ranks[i - 1] };
        let right = if i + 1 == d { 1 } else { self.ranks[i] };
        (left, right)
    }
}

impl HomogeneousShape for TtShape {
    fn tag(&self) -> &'static str {
        "tt"
    }
    fn dims(&self) -> &[usize] {
        &self.dims
    }
    fn leading(&self) -> Vec<usize> {
        (0..self.dims.len()).map(|i| {
            let (a, b) = self.bond(i);
            a * b
        }).collect()
    }
    fn reference_core(&self) -> DenseTensor {
        let d = self.dims.len();
        let shape = self.leading();
        DenseTensor::from_fn(shape, |beta| {
            let mut alpha = beta[0];
            for (i, &b) in beta.iter().enumerate().take(d - 1).skip(1) {
                let s = self.ranks[i];
                if b / s != alpha {
                    return 0.0;
                }
                alpha = b % s;
            }
            if beta[d - 1] == alpha { 1.0 } else { 0.0 }
        })
        .expect("positive ranks")
    }
    /// `Kⱼ = E_ab` enters mode `j` as `I ⊗ E_ab` and mode `j+1` as `−E_abᵀ ⊗ I`.
    fn stabilizer_topleft_basis(&self) -> Vec<Vec<Matrix>> {
        let ks = self.leading();
        let mut out = Vec::new();
        for (j, &s) in self.ranks.iter().enumerate() {
            for a in 0..s {
                for b in 0..s {
                    let mut e = Matrix::zeros(s, s);
                    e[(a, b)] = 1.0;
                    let mut blocks: Vec<Matrix> = ks.iter().map(|&k| Matrix::zeros(k, k)).collect();
                    blocks[j] = Matrix::kron(&Matrix::identity(self.bond(j).0), &e);
                    blocks[j + 1] = Matrix::kron(&e.transpose(), &Matrix::identity(self.bond(j + 1).1)).scale(-1.0);
                    out.push(blocks);
                }
            }
        }
        out
    }
    /// `tr₁Lⱼ = tr₂Lⱼ₊₁` for consecutive modes, where `tr₁(A⊗B) = (tr A)B`
    /// and `tr₂(A⊗B) = (tr B)Aᵀ`.
    fn complement_residual(&self, blocks: &[Matrix]) -> f64 {
        (0..self.ranks.len())
            .map(|j| {
                let (l, r) = self.bond(j);
                let left = partial_trace(&blocks[j], &[l, r], 1);
                let (l2, r2) = self.bond(j + 1);
                let right = partial_trace(&blocks[j + 1], &[l2, r2], 0).transpose();
                (&left - &right).max_abs()
            })
            .fold(0.0, f64::max)
    }
    fn sample_stabilizer(&self, rng: &mut TestRng, off_diagonal: bool) -> GroupElement {
        TtStabilizerSample::random(self, rng, off_diagonal).assemble()
    }
}

pub type TtPoint = Point<TtShape>;
pub type TtTangent = Tangent;

/// Point represented by unfolded cores `Fᵢ` (`nᵢ × sᵢ₋₁sᵢ`); ranks are read
/// from the core widths.
pub fn tt_point_from_cores(cores: &[Matrix]) -> Result<TtPoint> {
    if cores.len() < 3 {
        return Err(Error::InvalidShape("need at least three cores".into()));
    }
    let d = cores.len();
    let mut ranks = alloc::vec![cores[0].cols()];
    for (i, f) in cores.iter().enumerate().skip(1).take(d - 2) {
        let prev = ranks[i - 1];
        if f.cols() % prev != 0 {
            return Err(Error::DimensionMismatch(format!("core {} width {} not a multiple of {prev}", i + 1, f.cols())));
        }
        ranks.push(f.cols() / prev);
    }
    if cores[d - 1].cols() != ranks[d - 2] {
        return Err(Error::DimensionMismatch("last core width must equal the last TT rank".into()));
    }
    let shape = TtShape::new(cores.iter().map(Matrix::rows).collect(), ranks)?;
    for (i, f) in cores.iter().enumerate() {
        check_factor(f, &format!("TT core {}", i + 1))?;
    }
    Point::from_columns(shape, cores)
}

/// Element of the stabilizer with mode blocks `A₁`, `A₁⁻ᵀ⊗A₂`, …, `A_{d−1}⁻ᵀ`
/// plus off-diagonal `Mᵢ` and lower-right `Bᵢ` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct TtStabilizerSample {
    /// `A₁, …, A_{d−1}`.
    pub a: Vec<Matrix>,
    pub m: Vec<Matrix>,
    pub b: Vec<Matrix>,
}

impl TtStabilizerSample {
    pub fn identity(shape: &TtShape) -> Self {
        let ks = shape.leading();
        Self {
            a: shape.ranks.iter().map(|&s| Matrix::identity(s)).collect(),
            m: shape.dims.iter().zip(&ks).map(|(&n, &k)| Matrix::zeros(k, n - k)).collect(),
            b: shape.dims.iter().zip(&ks).map(|(&n, &k)| Matrix::identity(n - k)).collect(),
        }
    }

    pub fn sample(shape: &TtShape, seed: u64) -> Self {
        Self::random(shape, &mut seeded(seed), true)
    }

    pub fn random(shape: &TtShape, rng: &mut TestRng, off_diagonal: bool) -> Self {
        let ks = shape.leading();
        let a = shape.ranks.iter().map(|&s| near_identity(rng, s, 0.5)).collect();
        let m = shape
            .dims
            .iter()
            .zip(&ks)
            .map(|(&n, &k)| if off_diagonal { gaussian(rng, k, n - k) } else { Matrix::zeros(k, n - k) })
            .collect();
        let b = shape.dims.iter().zip(&ks).map(|(&n, &k)| near_identity(rng, n - k, 0.3)).collect();
        Self { a, m, b }
    }

    /// Top-left block of mode `i` (0-based): `Aᵢ₋₁⁻ᵀ ⊗ Aᵢ` with unit ends.
    pub fn mode_block(&self, i: usize) -> Result<Matrix> {
        let one = Matrix::identity(1);
        let left = if i == 0 { one.clone() } else { inverse(&self.a[i - 1])?.transpose() };
        let right = self.a.get(i).unwrap_or(&one);
        Ok(Matrix::kron(&left, right))
    }

    pub fn assemble(&self) -> GroupElement {
        let factors = (0..self.m.len())
            .map(|i| {
                let top = self.mode_block(i).expect("invertible Aᵢ");
                let k = top.rows();
                let n = k + self.b[i].rows();
                let mut h = Matrix::zeros(n, n);
                h.set_block(0, 0, &top);
                h.set_block(0, k, &self.m[i]);
                h.set_block(k, k, &self.b[i]);
                h
            })
            .collect();
        GroupElement::new(factors).expect("invertible stabilizer sample")
    }
}

/// Per-mode `110nᵢkᵢ²/3 + (146 + 36zᵢ)kᵢ³` with `kᵢ = sᵢ₋₁sᵢ`.
pub fn tt_flop_formula(shape: &TtShape, z: &[u32]) -> Result<Ratio<i128>> {
    if z.len() != shape.dims.len() {
        return Err(Error::DimensionMismatch(format!("{} exponents for {} modes", z.len(), shape.dims.len())));
    }
    Ok(geodesic_flop_formula(&shape.dims, &shape.leading(), z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl::{mode_apply, AlgebraElement};
    use crate::homogeneous::{m_membership, project_m, reductive_check};
    use crate::linalg::{multilinear_rank, tt_rank};
    use crate::oracle::contract_tt;

    fn shape(n: &[usize], s: &[usize]) -> TtShape {
        TtShape::new(n.to_vec(), s.to_vec()).unwrap()
    }

    fn topleft_element(s: &TtShape, l: &[Matrix]) -> AlgebraElement {
        AlgebraElement::new(
            s.dims()
                .iter()
                .zip(l)
                .map(|(&n, b)| {
                    let mut m = Matrix::zeros(n, n);
                    m.set_block(0, 0, b);
                    m
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(TtShape::new(alloc::vec![2, 3, 2], alloc::vec![2, 2]).is_err());
        assert!(TtShape::new(alloc::vec![2, 4, 2], alloc::vec![2]).is_err());
        assert_eq!(shape(&[3, 6, 3], &[2, 3]).leading(), [2, 6, 3]);
    }

    #[test]
    fn reference_tensors() {
        let t = shape(&[2, 2, 2], &[1, 1]).reference_tensor();
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        assert_eq!(t.frobenius_norm(), 1.0);
        let t = shape(&[2, 4, 2], &[2, 2]).reference_tensor();
        assert_eq!(tt_rank(&t, 1e-12), [2, 2]);
        assert_eq!(multilinear_rank(&t, 1e-12), [2, 4, 2]);
        let s = shape(&[3, 5, 3], &[2, 2]);
        let e: Vec<Matrix> = s.dims().iter().zip(s.leading()).map(|(&n, k)| Matrix::eye(n, k)).collect();
        assert_eq!(contract_tt(&e).unwrap(), s.reference_tensor());
    }

    #[test]
    fn cores_embed_to_contraction() {
        let mut rng = seeded(21);
        let f = alloc::vec![gaussian(&mut rng, 3, 2), gaussian(&mut rng, 5, 4), gaussian(&mut rng, 3, 2)];
        let p = tt_point_from_cores(&f).unwrap();
        let want = contract_tt(&f).unwrap();
        assert!(p.embed().distance(&want).unwrap() <= 1e-12 * want.frobenius_norm());
        assert_eq!(tt_rank(&p.embed(), 1e-10), [2, 2]);
    }

    #[test]
    fn identity_cores_give_reference_point() {
        let s = shape(&[3, 5, 3], &[2, 2]);
        let e: Vec<Matrix> = s.dims().iter().zip(s.leading()).map(|(&n, k)| Matrix::eye(n, k)).collect();
        assert_eq!(tt_point_from_cores(&e).unwrap(), TtPoint::reference(s));
    }

    #[test]
    fn deficient_core_rejected() {
        let mut rng = seeded(22);
        let mut f2 = gaussian(&mut rng, 5, 4);
        for i in 0..5 {
            f2[(i, 3)] = 2.0 * f2[(i, 1)];
        }
        let f = alloc::vec![gaussian(&mut rng, 3, 2), f2, gaussian(&mut rng, 3, 2)];
        assert!(matches!(tt_point_from_cores(&f), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn gauge_change_keeps_embedding() {
        let mut rng = seeded(23);
        let f = alloc::vec![gaussian(&mut rng, 3, 2), gaussian(&mut rng, 7, 6), gaussian(&mut rng, 10, 9), gaussian(&mut rng, 3, 3)];
        let u1 = near_identity(&mut rng, 2, 0.5);
        let u2 = near_identity(&mut rng, 3, 0.5);
        let u3 = near_identity(&mut rng, 3, 0.5);
        let it = |u: &Matrix| inverse(u).unwrap().transpose();
        let g = alloc::vec![
            f[0].matmul(&u1),
            f[1].matmul(&Matrix::kron(&it(&u1), &u2)),
            f[2].matmul(&Matrix::kron(&it(&u2), &u3)),
            f[3].matmul(&it(&u3)),
        ];
        let a = tt_point_from_cores(&f).unwrap().embed();
        let b = tt_point_from_cores(&g).unwrap().embed();
        assert!(a.distance(&b).unwrap() <= 1e-11 * a.frobenius_norm());
    }

    #[test]
    fn stabilizer_fixes_reference() {
        let s = shape(&[3, 5, 3], &[2, 2]);
        let t = s.reference_tensor();
        assert_eq!(mode_apply(&TtStabilizerSample::identity(&s).assemble(), &t).unwrap(), t);
        let mut fixed = TtStabilizerSample::identity(&s);
        fixed.a[0] = Matrix::diag(&[2.0, 1.0]);
        assert_eq!(fixed.mode_block(0).unwrap(), Matrix::diag(&[2.0, 1.0]));
        assert_eq!(fixed.mode_block(1).unwrap(), Matrix::kron(&Matrix::diag(&[0.5, 1.0]), &Matrix::identity(2)));
        assert_eq!(mode_apply(&fixed.assemble(), &t).unwrap(), t);
        for seed in 0..10 {
            let h = TtStabilizerSample::sample(&s, seed).assemble();
            assert!(mode_apply(&h, &t).unwrap().distance(&t).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn trace_chain() {
        let s = shape(&[2, 4, 2], &[2, 2]);
        let l = [Matrix::identity(2).scale(2.0), Matrix::identity(4), Matrix::identity(2).scale(2.0)];
        assert!(m_membership(&s, &topleft_element(&s, &l), 1e-14));
        let mut rng = seeded(24);
        let a = gaussian(&mut rng, 2, 2);
        let b = gaussian(&mut rng, 2, 2);
        // tr₁ of the middle block meets the transpose of the last block.
        let l = [a.transpose().scale(b.trace()), Matrix::kron(&a, &b), b.transpose().scale(a.trace())];
        assert!(m_membership(&s, &topleft_element(&s, &l), 1e-13));
        let mut bad = l.clone();
        bad[2][(1, 0)] += 1e-3;
        assert!(!m_membership(&s, &topleft_element(&s, &bad), 1e-8));
        let z = AlgebraElement::new(s.dims().iter().map(|&n| gaussian(&mut rng, n, n)).collect()).unwrap();
        assert!(m_membership(&s, &project_m(&s, &z).unwrap(), 1e-12));
    }

    #[test]
    fn reductive_only_when_square() {
        let sq = reductive_check(&shape(&[2, 4, 2], &[2, 2]), 20, 3).unwrap();
        assert!(sq.max_residual <= 1e-12, "{}", sq.max_residual);
        let ns = reductive_check(&shape(&[3, 4, 2], &[2, 2]), 20, 3).unwrap();
        assert!(ns.max_residual >= 0.05);
    }

    #[test]
    fn flop_formula_example() {
        let s = shape(&[4, 8, 4], &[2, 2]);
        assert_eq!(tt_flop_formula(&s, &[2, 2, 2]).unwrap(), Ratio::new(69920, 3));
    }

    #[test]
    fn dimension_count() {
        let s = shape(&[3, 5, 3], &[2, 2]);
        let p = TtPoint::reference(s.clone());
        let dim_g: usize = s.dims().iter().map(|n| n * n).sum();
        assert_eq!(p.vertical_basis().unwrap().len(), dim_g - s.manifold_dim());
        assert_eq!(s.manifold_dim(), 3 * 2 + 5 * 4 + 3 * 2 - 8);
    }
}
