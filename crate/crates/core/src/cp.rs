// SPDX-License-Identifier: Apache-2.0
//! Tensors of CP rank `r`: the orbit of `Σⱼ e₁ʲ ⊗ … ⊗ e_dʲ`.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gl::GroupElement;
use crate::homogeneous::{
    check_dims, check_factor, geodesic_flop_formula, HomogeneousShape, Point, Tangent,
};
use crate::linalg::{DenseTensor, Matrix, Permutation};
use crate::rng::{gaussian, near_identity, seeded, TestRng};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpShape {
    dims: Vec<usize>,
    r: usize,
}

impl CpShape {
    pub fn new(dims: Vec<usize>, r: usize) -> Result<Self> {
        check_dims(&dims)?;
        if r == 0 || dims.iter().any(|&n| r > n) {
            return Err(Error::InvalidShape(format!("CP rank {r} must satisfy 1 ≤ r ≤ min{dims:?}")));
        }
        Ok(Self { dims, r })
    }
    pub fn rank(&self) -> usize {
        self.r
    }
}

impl HomogeneousShape for CpShape {
    fn tag(&self) -> &'static str {
        "cp"
    }
    fn dims(&self) -> &[usize] {
        &self.dims
    }
    fn leading(&self) -> Vec<usize> {
        alloc::vec![self.r; self.dims.len()]
    }
    fn reference_core(&self) -> DenseTensor {
        let shape = alloc::vec![self.r; self.dims.len()];
        DenseTensor::from_fn(shape, |idx| if idx.iter().all(|&a| a == idx[0]) { 1.0 } else { 0.0 })
            .expect("positive extents")
    }
    fn stabilizer_topleft_basis(&self) -> Vec<Vec<Matrix>> {
        let d = self.dims.len();
        let mut out = Vec::new();
        for i in 0..d - 1 {
            for j in 0..self.r {
                let mut blocks: Vec<Matrix> = (0..d).map(|_| Matrix::zeros(self.r, self.r)).collect();
                blocks[i][(j, j)] = 1.0;
                blocks[d - 1][(j, j)] = -1.0;
                out.push(blocks);
            }
        }
        out
    }
    fn complement_residual(&self, blocks: &[Matrix]) -> f64 {
        // Diagonals agree across modes.
        let mut worst: f64 = 0.0;
        for b in &blocks[1..] {
            for j in 0..self.r {
                worst = worst.max((b[(j, j)] - blocks[0][(j, j)]).abs());
            }
        }
        worst
    }
    fn sample_stabilizer(&self, rng: &mut TestRng, off_diagonal: bool) -> GroupElement {
        CpStabilizerSample::random(self, rng, off_diagonal).assemble()
    }
}

pub type CpPoint = Point<CpShape>;
pub type CpTangent = Tangent;

/// Point represented by the factor matrices `Vᵢ` (`nᵢ × r`), i.e. the tensor
/// `Σⱼ v₁ʲ ⊗ … ⊗ v_dʲ`.
pub fn cp_point_from_factors(factors: &[Matrix]) -> Result<CpPoint> {
    let r = factors.first().map(Matrix::cols).ok_or(Error::InvalidArgument("no factors".into()))?;
    if factors.iter().any(|v| v.cols() != r) {
        return Err(Error::DimensionMismatch("factor matrices need a common column count".into()));
    }
    for (i, v) in factors.iter().enumerate() {
        check_factor(v, &format!("CP factor {}", i + 1))?;
    }
    let shape = CpShape::new(factors.iter().map(Matrix::rows).collect(), r)?;
    Point::from_columns(shape, factors)
}

/// Element `h = ([Q Dᵢ  Mᵢ; 0  Aᵢ])ᵢ` of the stabilizer of the reference tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct CpStabilizerSample {
    pub diagonals: Vec<Vec<f64>>,
    pub q: Permutation,
    pub m: Vec<Matrix>,
    pub a: Vec<Matrix>,
}

impl CpStabilizerSample {
    pub fn identity(shape: &CpShape) -> Self {
        let r = shape.r;
        Self {
            diagonals: shape.dims.iter().map(|_| alloc::vec![1.0; r]).collect(),
            q: Permutation::identity(r),
            m: shape.dims.iter().map(|&n| Matrix::zeros(r, n - r)).collect(),
            a: shape.dims.iter().map(|&n| Matrix::identity(n - r)).collect(),
        }
    }

    /// Deterministic sample for `seed`.
    pub fn sample(shape: &CpShape, seed: u64) -> Self {
        Self::random(shape, &mut seeded(seed), true)
    }

    /// Diagonal entries are powers of two, so `D₁⋯D_d = 1` holds exactly.
    pub fn random(shape: &CpShape, rng: &mut TestRng, off_diagonal: bool) -> Self {
        let (d, r) = (shape.dims.len(), shape.r);
        let mut exps = alloc::vec![alloc::vec![0i32; r]; d];
        for j in 0..r {
            let mut sum = 0;
            for e in exps.iter_mut().take(d - 1) {
                e[j] = rng.random_range(-2..=2);
                sum += e[j];
            }
            exps[d - 1][j] = -sum;
        }
        let sign = |rng: &mut TestRng| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let mut diagonals: Vec<Vec<f64>> =
            exps.iter().map(|e| e.iter().map(|&x| libm::ldexp(1.0, x)).collect()).collect();
        // Paired sign flips keep the product at one.
        for j in 0..r {
            let s = sign(rng);
            diagonals[0][j] *= s;
            diagonals[1][j] *= s;
        }
        let mut img: Vec<usize> = (0..r).collect();
        img.shuffle(rng);
        let q = Permutation::from_vec(img).expect("shuffled identity");
        let m = shape
            .dims
            .iter()
            .map(|&n| if off_diagonal { gaussian(rng, r, n - r) } else { Matrix::zeros(r, n - r) })
            .collect();
        let a = shape.dims.iter().map(|&n| near_identity(rng, n - r, 0.3)).collect();
        Self { diagonals, q, m, a }
    }

    pub fn assemble(&self) -> GroupElement {
        let qm = self.q.to_matrix();
        let factors = self
            .diagonals
            .iter()
            .zip(self.m.iter().zip(&self.a))
            .map(|(dg, (m, a))| {
                let r = dg.len();
                let n = r + a.rows();
                let mut h = Matrix::zeros(n, n);
                h.set_block(0, 0, &qm.matmul(&Matrix::diag(dg)));
                h.set_block(0, r, m);
                h.set_block(r, r, a);
                h
            })
            .collect();
        GroupElement::new(factors).expect("invertible stabilizer sample")
    }
}

/// `Σᵢ 110nᵢr²/3 + (146 + 36zᵢ)r³`.
pub fn cp_flop_formula(shape: &CpShape, z: &[u32]) -> Result<Ratio<i128>> {
    if z.len() != shape.dims.len() {
        return Err(Error::DimensionMismatch(format!("{} exponents for {} modes", z.len(), shape.dims.len())));
    }
    Ok(geodesic_flop_formula(&shape.dims, &shape.leading(), z))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl::mode_apply;
    use crate::homogeneous::{project_m, reductive_check};
    use crate::linalg::multilinear_rank;
    use crate::oracle::contract_cp;
    use crate::gl::AlgebraElement;

    fn shape(dims: &[usize], r: usize) -> CpShape {
        CpShape::new(dims.to_vec(), r).unwrap()
    }

    #[test]
    fn reference_tensor_entries() {
        let t = shape(&[3, 3, 3], 1).reference_tensor();
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        assert_eq!(t.frobenius_norm(), 1.0);
        let t = shape(&[2, 2, 2], 2).reference_tensor();
        assert_eq!(t.data(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(multilinear_rank(&shape(&[4, 5, 3], 2).reference_tensor(), 1e-12), [2, 2, 2]);
    }

    #[test]
    fn invalid_shapes() {
        assert!(CpShape::new(alloc::vec![3, 3], 1).is_err());
        assert!(CpShape::new(alloc::vec![3, 2, 3], 3).is_err());
        assert!(CpShape::new(alloc::vec![3, 3, 3], 0).is_err());
    }

    #[test]
    fn from_factors_matches_direct_sum() {
        let mut rng = seeded(3);
        let v: Vec<Matrix> = (0..3).map(|_| gaussian(&mut rng, 4, 2)).collect();
        let p = cp_point_from_factors(&v).unwrap();
        let want = contract_cp(&v).unwrap();
        assert!(p.embed().distance(&want).unwrap() <= 1e-12 * want.frobenius_norm());
    }

    #[test]
    fn identity_factors_give_reference_point() {
        let s = shape(&[4, 3, 5], 2);
        let v: Vec<Matrix> = s.dims().iter().map(|&n| Matrix::eye(n, 2)).collect();
        let p = cp_point_from_factors(&v).unwrap();
        assert_eq!(p, CpPoint::reference(s.clone()));
        assert!(p.modes().iter().all(|m| m.perm().is_identity()));
        assert_eq!(p.embed(), s.reference_tensor());
    }

    #[test]
    fn dependent_columns_rejected() {
        let mut rng = seeded(4);
        let mut v: Vec<Matrix> = (0..3).map(|_| gaussian(&mut rng, 4, 2)).collect();
        let c = v[0].column(0);
        for (i, x) in c.into_iter().enumerate() {
            v[0][(i, 1)] = x;
        }
        assert!(matches!(cp_point_from_factors(&v), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn stabilizer_fixes_reference() {
        let s = shape(&[4, 4, 4], 2);
        let t = s.reference_tensor();
        let id = CpStabilizerSample::identity(&s).assemble();
        assert_eq!(mode_apply(&id, &t).unwrap(), t);
        let mut fixed = CpStabilizerSample::identity(&s);
        fixed.diagonals[0] = alloc::vec![2.0, 1.0];
        fixed.diagonals[1] = alloc::vec![0.5, 1.0];
        assert_eq!(mode_apply(&fixed.assemble(), &t).unwrap(), t);
        for seed in 0..10 {
            let h = CpStabilizerSample::sample(&s, seed).assemble();
            assert!(mode_apply(&h, &t).unwrap().distance(&t).unwrap() <= 1e-13);
        }
        assert_eq!(CpStabilizerSample::sample(&s, 7), CpStabilizerSample::sample(&s, 7));
    }

    #[test]
    fn dimension_count() {
        let s = shape(&[4, 5, 6], 3);
        assert_eq!(s.manifold_dim(), 15 * 3 - 2 * 3);
        let p = CpPoint::reference(s.clone());
        let dim_g: usize = s.dims().iter().map(|n| n * n).sum();
        assert_eq!(p.vertical_basis().unwrap().len(), dim_g - s.manifold_dim());
    }

    #[test]
    fn projection_at_identity_matches_closed_form() {
        let s = shape(&[4, 3, 5], 2);
        let p = CpPoint::reference(s.clone());
        let mut rng = seeded(5);
        let z = AlgebraElement::new(s.dims().iter().map(|&n| gaussian(&mut rng, n, n)).collect()).unwrap();
        let x = p.project_horizontal(&z).unwrap();
        let dense = p.densify_tangent(&x).unwrap();
        // Right block columns vanish; off-diagonal entries survive; diagonals averaged.
        let want = project_m(&s, &z).unwrap();
        for (a, b) in dense.factors().iter().zip(want.factors()) {
            assert!((a - b).max_abs() < 1e-12);
        }
        for j in 0..2 {
            let mean = z.factors().iter().map(|f| f[(j, j)]).sum::<f64>() / 3.0;
            assert!((want.factors()[1][(j, j)] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn horizontal_check_detects_perturbation() {
        let mut rng = seeded(6);
        let v: Vec<Matrix> = (0..3).map(|_| gaussian(&mut rng, 5, 2)).collect();
        let p = cp_point_from_factors(&v).unwrap();
        let x = p.random_horizontal(&mut rng).unwrap();
        assert!(p.is_horizontal(&x, 1e-9));
        let mut modes = x.modes().to_vec();
        let h = &modes[0];
        let mut g = h.gamma12().clone();
        g[(0, 0)] += 1e-3;
        modes[0] = crate::gl::HorizontalBlocks::from_parts(h.x11(), h.x21(), g).unwrap();
        assert!(!p.is_horizontal(&Tangent::from_modes(modes), 1e-6));
    }

    #[test]
    fn reductive_only_when_square() {
        let sq = reductive_check(&shape(&[2, 2, 2], 2), 20, 1).unwrap();
        assert!(sq.square && sq.max_residual <= 1e-12);
        let ns = reductive_check(&shape(&[3, 3, 3], 2), 20, 1).unwrap();
        assert!(!ns.square && ns.max_residual >= 0.05);
    }

    #[test]
    fn flop_formula_example() {
        let s = shape(&[100, 100, 100], 5);
        assert_eq!(cp_flop_formula(&s, &[3, 3, 3]).unwrap(), Ratio::from_integer(370250));
        let s2 = shape(&[100, 100, 100], 10);
        let cubic = |s: &CpShape| cp_flop_formula(s, &[3, 3, 3]).unwrap() - cp_flop_formula(s, &[0, 0, 0]).unwrap();
        assert_eq!(cubic(&s2), cubic(&s) * Ratio::from_integer(8));
    }
}
