// SPDX-License-Identifier: Apache-2.0
//! Right-invariant geometry of `GL(n₁) × … × GL(n_d)` and the low-rank
//! geodesic step on block lower triangular representatives.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{counted, inverse, pivot_rows, select_submatrix, DenseTensor, FlopLedger, Lu, Matrix, Permutation};
use crate::psi::{make_scaling_plan, mexp_small, psi1_with_plan};

/// `(g₁, …, g_d)` with square, finite, nonsingular factors.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    factors: Vec<Matrix>,
}

impl GroupElement {
    /// Rejects non-square, non-finite or exactly singular factors. Use
    /// [`GroupElement::min_relative_singular_value`] for a conditioning check.
    pub fn new(factors: Vec<Matrix>) -> Result<Self> {
        for f in &factors {
            if !f.is_square() {
                return Err(Error::DimensionMismatch(format!("{}x{} group factor", f.rows(), f.cols())));
            }
            if !f.is_finite() {
                return Err(Error::NonFinite("group factor"));
            }
            Lu::factor(f).map_err(|_| Error::Singular("group factor"))?;
        }
        Ok(Self { factors })
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { factors: dims.iter().map(|&n| Matrix::identity(n)).collect() }
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<Matrix> {
        self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.rows()).collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self { factors: self.factors.iter().map(inverse).collect::<Result<_>>()? })
    }

    /// `self · other`, factor by factor.
    pub fn compose(&self, other: &GroupElement) -> Result<Self> {
        check_profile(&self.dims(), &other.dims())?;
        Ok(Self { factors: self.factors.iter().zip(&other.factors).map(|(a, b)| a.matmul(b)).collect() })
    }

    /// `min_i σ_min(g_i)/σ_max(g_i)`.
    pub fn min_relative_singular_value(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| 1.0 / crate::linalg::condition_number(f))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(Z₁, …, Z_d)` with square factors: an element of the Lie algebra, or a
/// tangent vector at some group element.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    factors: Vec<Matrix>,
}

impl AlgebraElement {
    pub fn new(factors: Vec<Matrix>) -> Result<Self> {
        for f in &factors {
            if !f.is_square() {
                return Err(Error::DimensionMismatch(format!("{}x{} algebra factor", f.rows(), f.cols())));
            }
            if !f.is_finite() {
                return Err(Error::NonFinite("algebra factor"));
            }
        }
        Ok(Self { factors })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        Self { factors: dims.iter().map(|&n| Matrix::zeros(n, n)).collect() }
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn into_factors(self) -> Vec<Matrix> {
        self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.rows()).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { factors: self.factors.iter().map(|f| f.scale(s)).collect() }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &AlgebraElement) -> Result<Self> {
        check_profile(&self.dims(), &other.dims())?;
        Ok(Self {
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| {
                    let mut c = a.clone();
                    c.axpy(s, b);
                    c
                })
                .collect(),
        })
    }

    /// `√⟨Z, Z⟩`.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.factors.iter().map(|f| f.dot(f)).sum())
    }

    /// `Z · g` (right translation), factor by factor.
    pub fn right_mul(&self, g: &GroupElement) -> Result<Self> {
        check_profile(&self.dims(), &g.dims())?;
        Ok(Self { factors: self.factors.iter().zip(g.factors()).map(|(z, h)| z.matmul(h)).collect() })
    }

    /// `g · Z` (left translation), factor by factor.
    pub fn left_mul(&self, g: &GroupElement) -> Result<Self> {
        check_profile(&self.dims(), &g.dims())?;
        Ok(Self { factors: self.factors.iter().zip(g.factors()).map(|(z, h)| h.matmul(z)).collect() })
    }
}

fn check_profile(a: &[usize], b: &[usize]) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("profiles {a:?} and {b:?}")));
    }
    Ok(())
}

/// `Σ_i tr(Z_i W_iᵀ)`.
pub fn euclidean_inner(z: &AlgebraElement, w: &AlgebraElement) -> Result<f64> {
    check_profile(&z.dims(), &w.dims())?;
    Ok(z.factors.iter().zip(&w.factors).map(|(a, b)| a.dot(b)).sum())
}

/// Right-invariant metric at `g`: `⟨x g⁻¹, y g⁻¹⟩`.
pub fn right_invariant_inner(g: &GroupElement, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    let gi = g.inverse()?;
    euclidean_inner(&x.right_mul(&gi)?, &y.right_mul(&gi)?)
}

/// Geodesic of the right-invariant metric through `g` with velocity `x`,
/// at time `t`: `mexp(W − Wᵀ)·mexp(Wᵀ)·g` with `W = t·x·g⁻¹`.
pub fn gl_exp(g: &GroupElement, x: &AlgebraElement, t: f64) -> Result<GroupElement> {
    check_profile(&g.dims(), &x.dims())?;
    let factors = g
        .factors()
        .iter()
        .zip(x.factors())
        .map(|(gi, xi)| {
            let w = xi.matmul(&inverse(gi)?).scale(t);
            let wt = w.transpose();
            Ok(mexp_small(&(&w - &wt))?.matmul(&mexp_small(&wt)?).matmul(gi))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupElement::new(factors)
}

/// `h x h⁻¹`, factor by factor.
pub fn adjoint(h: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    check_profile(&h.dims(), &x.dims())?;
    let factors = h
        .factors()
        .iter()
        .zip(x.factors())
        .map(|(hi, xi)| Ok(hi.matmul(xi).matmul(&inverse(hi)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraElement { factors })
}

/// Multiplies `t` by `g_i` along mode `i`.
pub fn mode_apply(g: &GroupElement, t: &DenseTensor) -> Result<DenseTensor> {
    t.multilinear_product(g.factors())
}

/// Leading `k` columns of a group factor in block lower triangular form.
///
/// `frame` is the `n × k` matrix `[g₁₁; g₂₁]` in permuted row order: the
/// full factor is `Pᵀ [g₁₁ 0; g₂₁ I]` with `P` = `perm`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBlocks {
    perm: Permutation,
    frame: Matrix,
}

impl ModeBlocks {
    /// Reduces the leading columns of a group factor (original row order).
    pub fn from_columns(cols: &Matrix) -> Result<Self> {
        let perm = select_submatrix(cols)?;
        let frame = cols.permute_rows(&perm);
        Ok(Self { perm, frame })
    }

    pub fn from_parts(perm: Permutation, g11: Matrix, g21: Matrix) -> Result<Self> {
        let k = g11.rows();
        if !g11.is_square() || g21.cols() != k || perm.len() != k + g21.rows() {
            return Err(Error::DimensionMismatch(format!(
                "blocks g11 {}x{}, g21 {}x{}, permutation of {}",
                g11.rows(),
                g11.cols(),
                g21.rows(),
                g21.cols(),
                perm.len()
            )));
        }
        if !g11.is_finite() || !g21.is_finite() {
            return Err(Error::NonFinite("mode blocks"));
        }
        Lu::factor(&g11).map_err(|_| Error::Singular("g11"))?;
        Ok(Self { perm, frame: Matrix::vstack(&g11, &g21) })
    }

    pub fn n(&self) -> usize {
        self.frame.rows()
    }
    pub fn k(&self) -> usize {
        self.frame.cols()
    }
    pub fn perm(&self) -> &Permutation {
        &self.perm
    }
    /// `[g₁₁; g₂₁]`, permuted row order.
    pub fn frame(&self) -> &Matrix {
        &self.frame
    }
    pub fn g11(&self) -> Matrix {
        self.frame.top_rows(self.k())
    }
    pub fn g21(&self) -> Matrix {
        self.frame.bottom_rows(self.k())
    }
    /// Leading columns in the original row order.
    pub fn columns(&self) -> Matrix {
        self.frame.unpermute_rows(&self.perm)
    }

    /// Full `n × n` factor `Pᵀ[g₁₁ 0; g₂₁ I]`. Test and oracle use only.
    pub fn densify(&self) -> Matrix {
        let mut g = Matrix::identity(self.n());
        g.set_block(0, 0, &self.frame);
        g.unpermute_rows(&self.perm)
    }
}

/// Leading `k` columns `A = [X₁₁; X₂₁]` of a horizontal tangent factor,
/// in the row order of its [`ModeBlocks`], with the cached `Γ₁₂`.
/// The full factor is `Pᵀ[X₁₁, X₁₁Γ₁₂; X₂₁, X₂₁Γ₁₂]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalBlocks {
    first_cols: Matrix,
    gamma12: Matrix,
}

impl HorizontalBlocks {
    /// `first_cols` is `n × k` in the permuted row order of `blocks`.
    pub fn new(blocks: &ModeBlocks, first_cols: Matrix) -> Result<Self> {
        if first_cols.shape() != blocks.frame().shape() {
            return Err(Error::DimensionMismatch(format!(
                "tangent columns {}x{} for a {}x{} frame",
                first_cols.rows(),
                first_cols.cols(),
                blocks.n(),
                blocks.k()
            )));
        }
        if !first_cols.is_finite() {
            return Err(Error::NonFinite("tangent blocks"));
        }
        let gamma12 = gamma12(blocks, &mut FlopLedger::new())?;
        Ok(Self { first_cols, gamma12 })
    }

    pub fn from_parts(x11: Matrix, x21: Matrix, gamma12: Matrix) -> Result<Self> {
        let k = x11.rows();
        if !x11.is_square() || x21.cols() != k || gamma12.shape() != (k, x21.rows()) {
            return Err(Error::DimensionMismatch("horizontal blocks".into()));
        }
        if !x11.is_finite() || !x21.is_finite() || !gamma12.is_finite() {
            return Err(Error::NonFinite("tangent blocks"));
        }
        Ok(Self { first_cols: Matrix::vstack(&x11, &x21), gamma12 })
    }

    pub fn zeros(blocks: &ModeBlocks) -> Result<Self> {
        Self::new(blocks, Matrix::zeros(blocks.n(), blocks.k()))
    }

    pub fn first_cols(&self) -> &Matrix {
        &self.first_cols
    }
    pub fn gamma12(&self) -> &Matrix {
        &self.gamma12
    }
    pub fn x11(&self) -> Matrix {
        self.first_cols.top_rows(self.first_cols.cols())
    }
    pub fn x21(&self) -> Matrix {
        self.first_cols.bottom_rows(self.first_cols.cols())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { first_cols: self.first_cols.scale(s), gamma12: self.gamma12.clone() }
    }

    /// Full `n × n` tangent factor in the original row order. Test and
    /// oracle use only.
    pub fn densify(&self, blocks: &ModeBlocks) -> Matrix {
        let k = self.first_cols.cols();
        let a = &self.first_cols;
        let right = a.matmul(&self.gamma12);
        let mut x = Matrix::zeros(a.rows(), a.rows());
        x.set_block(0, 0, a);
        x.set_block(0, k, &right);
        x.unpermute_rows(blocks.perm())
    }
}

/// `B = [I Γ₁₂]·ĝ⁻¹ = (GᵀG)⁻¹Gᵀ` for the frame `G = [g₁₁; g₂₁]`; its
/// trailing `n − k` columns are `Γ₁₂`. Charged to `"gamma12"`:
/// `F = G/g₁₁`, `P = FᵀF`, `C = g₁₁\(P\I)`, `B = C·Fᵀ`.
fn frame_pseudo_inverse(blocks: &ModeBlocks, ledger: &mut FlopLedger) -> Result<Matrix> {
    const STEP: &str = "gamma12";
    let k = blocks.k();
    let g11 = blocks.g11();
    let f = counted::solve_right(ledger, STEP, blocks.frame(), &g11).map_err(|_| Error::Singular("g11"))?;
    let p = counted::tmul(ledger, STEP, &f, &f)?;
    let c1 = counted::solve(ledger, STEP, &p, &Matrix::identity(k))?;
    let c = counted::solve(ledger, STEP, &g11, &c1).map_err(|_| Error::Singular("g11"))?;
    ledger.charge_elementwise(f.rows() * k);
    counted::mul(ledger, STEP, &c, &f.transpose())
}

/// `Γ₁₂ = g₁₁⁻¹g₁₁⁻ᵀg₂₁ᵀ(I + g₂₁g₁₁⁻¹g₁₁⁻ᵀg₂₁ᵀ)⁻¹`, built in `O(nk²)`.
pub fn gamma12(blocks: &ModeBlocks, ledger: &mut FlopLedger) -> Result<Matrix> {
    let b = frame_pseudo_inverse(blocks, ledger)?;
    let k = blocks.k();
    Ok(b.block(0, k, k, blocks.n() - k))
}

/// Result of one per-mode geodesic step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub blocks: ModeBlocks,
    /// Scaling exponent shared by both `ψ₁` evaluations.
    pub z: u32,
}

/// Names of the ledger lines written by [`lowrank_geodesic_step`], in order.
pub const STEP_NAMES: [&str; 9] =
    ["gamma12", "B", "BA", "B'A'", "psi1(BA)", "psi1(B'A')", "term2", "term3", "term4"];

/// Leading columns of `exp_ĝ(tX̂)` for a horizontal `X̂`, re-reduced to
/// block lower triangular form. Never forms an `n × n` matrix.
pub fn lowrank_geodesic_step(
    blocks: &ModeBlocks,
    tangent: &HorizontalBlocks,
    t: f64,
    ledger: &mut FlopLedger,
) -> Result<StepOutcome> {
    lowrank_geodesic_step_with_z(blocks, tangent, t, None, ledger)
}

/// As [`lowrank_geodesic_step`], optionally forcing the scaling exponent
/// (it must be at least the one the norms require).
pub fn lowrank_geodesic_step_with_z(
    blocks: &ModeBlocks,
    tangent: &HorizontalBlocks,
    t: f64,
    z: Option<u32>,
    ledger: &mut FlopLedger,
) -> Result<StepOutcome> {
    let (n, k) = (blocks.n(), blocks.k());
    if tangent.first_cols().shape() != (n, k) {
        return Err(Error::DimensionMismatch(format!("tangent for a {n}x{k} frame")));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("geodesic time"));
    }
    let g = blocks.frame();

    // B = [I Γ₁₂]ĝ⁻¹ comes out of the Γ₁₂ construction at no extra cost.
    let b = frame_pseudo_inverse(blocks, ledger)?;
    ledger.touch("B");
    let gamma = b.block(0, k, k, n - k);
    let mismatch = (&gamma - tangent.gamma12()).max_abs();
    if mismatch > 1e-8 * (1.0 + gamma.max_abs()) {
        return Err(Error::InvalidArgument(format!(
            "tangent Γ₁₂ differs from the representative's by {mismatch:e}"
        )));
    }

    let a = tangent.first_cols().scale(t);
    ledger.charge_elementwise(n * k);
    let ba = counted::mul(ledger, "BA", &b, &a)?;

    // Rank-2k factors of S = W − Wᵀ, balanced so that ‖B′A′‖ tracks ‖A‖‖B‖.
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    let s = if na > 0.0 { nb / na } else { 1.0 };
    let a2 = Matrix::hstack(&a, &b.transpose().scale(-1.0 / s));
    let b2 = Matrix::vstack(&b, &a.transpose().scale(s));
    ledger.charge_elementwise(4 * n * k);
    let ba2 = counted::mul(ledger, "B'A'", &b2, &a2)?;

    let plan = make_scaling_plan(ba.frobenius_norm()).max(make_scaling_plan(ba2.frobenius_norm()));
    let plan = match z {
        Some(forced) if forced < plan.z => {
            return Err(Error::InvalidArgument(format!(
                "scaling exponent {forced} below the required {}",
                plan.z
            )))
        }
        Some(forced) => crate::psi::ScalingPlan { z: forced, ..plan },
        None => plan,
    };
    let psi = psi1_with_plan(&ba, plan, ledger, "psi1(BA)")?;
    let psi2 = psi1_with_plan(&ba2, plan, ledger, "psi1(B'A')")?;

    // mexp(Wᵀ)G = G + Bᵀψ(BA)ᵀAᵀG.
    let u = counted::tmul(ledger, "term2", &a, g)?;
    let u = counted::tmul(ledger, "term2", &psi, &u)?;
    let term2 = counted::tmul(ledger, "term2", &b, &u)?;
    // mexp(S)·Y = Y + A′ψ(B′A′)B′Y for Y = G and Y = term2.
    let v = counted::mul(ledger, "term3", &b2, g)?;
    let v = counted::mul(ledger, "term3", &psi2, &v)?;
    let term3 = counted::mul(ledger, "term3", &a2, &v)?;
    let w = counted::mul(ledger, "term4", &b2, &term2)?;
    let w = counted::mul(ledger, "term4", &psi2, &w)?;
    let term4 = counted::mul(ledger, "term4", &a2, &w)?;

    let mut next = g.clone();
    next.axpy(1.0, &term2);
    next.axpy(1.0, &term3);
    next.axpy(1.0, &term4);
    ledger.charge_elementwise(3 * n * k);
    if !next.is_finite() {
        return Err(Error::NonFinite("geodesic step result"));
    }

    let (q, aux) = pivot_rows(&next, 0.0)?;
    ledger.charge_auxiliary(aux);
    let frame = next.permute_rows(&q);
    let perm = q.then_after(blocks.perm());
    Lu::factor(&frame.top_rows(k)).map_err(|_| Error::Singular("g11 after a geodesic step"))?;
    Ok(StepOutcome { blocks: ModeBlocks { perm, frame }, z: plan.z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian, near_identity, seeded};
    use alloc::vec;

    #[test]
    fn scalar_inner_and_exp() {
        let (a, v, t) = (2.0, 0.6, 1.5);
        let g = GroupElement::new(vec![Matrix::from_rows(&[&[a]])]).unwrap();
        let x = AlgebraElement::new(vec![Matrix::from_rows(&[&[v]])]).unwrap();
        assert!((right_invariant_inner(&g, &x, &x).unwrap() - v * v / (a * a)).abs() < 1e-15);
        let e = gl_exp(&g, &x, t).unwrap();
        assert!((e.factors()[0][(0, 0)] - libm::exp(t * v / a) * a).abs() < 1e-14);
    }

    #[test]
    fn gamma_scalar_and_zero() {
        let c = 0.7;
        let blocks =
            ModeBlocks::from_parts(Permutation::identity(2), Matrix::from_rows(&[&[1.0]]), Matrix::from_rows(&[&[c]]))
                .unwrap();
        let gm = gamma12(&blocks, &mut FlopLedger::new()).unwrap();
        assert!((gm[(0, 0)] - c / (1.0 + c * c)).abs() < 1e-15);
        let flat = ModeBlocks::from_parts(Permutation::identity(5), Matrix::identity(2), Matrix::zeros(3, 2)).unwrap();
        assert_eq!(gamma12(&flat, &mut FlopLedger::new()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn gamma_defining_relation() {
        let mut rng = seeded(3);
        let (n, k) = (9, 3);
        let blocks = ModeBlocks::from_columns(&gaussian(&mut rng, n, k)).unwrap();
        let (g11, g21) = (blocks.g11(), blocks.g21());
        let gi = inverse(&g11).unwrap();
        let h = g21.matmul(&gi);
        let mut inner = h.matmul(&h.transpose());
        inner.add_diagonal(1.0);
        let expect = gi.matmul(&h.transpose()).matmul(&inverse(&inner).unwrap());
        let got = gamma12(&blocks, &mut FlopLedger::new()).unwrap();
        assert!((&got - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn adjoint_of_diagonal() {
        let h = GroupElement::new(vec![Matrix::diag(&[2.0, 0.5, 3.0])]).unwrap();
        let mut x = Matrix::zeros(3, 3);
        x[(0, 2)] = 1.0;
        let y = adjoint(&h, &AlgebraElement::new(vec![x]).unwrap()).unwrap();
        assert!((y.factors()[0][(0, 2)] - 2.0 / 3.0).abs() < 1e-15);
        let back = adjoint(&h.inverse().unwrap(), &y).unwrap();
        assert!((back.factors()[0][(0, 2)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn right_translation_invariance() {
        let mut rng = seeded(4);
        let g = GroupElement::new(vec![near_identity(&mut rng, 4, 0.5), near_identity(&mut rng, 3, 0.5)]).unwrap();
        let h = GroupElement::new(vec![near_identity(&mut rng, 4, 0.5), near_identity(&mut rng, 3, 0.5)]).unwrap();
        let x = AlgebraElement::new(vec![gaussian(&mut rng, 4, 4), gaussian(&mut rng, 3, 3)]).unwrap();
        let y = AlgebraElement::new(vec![gaussian(&mut rng, 4, 4), gaussian(&mut rng, 3, 3)]).unwrap();
        let a = right_invariant_inner(&g, &x, &y).unwrap();
        let gh = g.compose(&h).unwrap();
        let b = right_invariant_inner(&gh, &x.right_mul(&h).unwrap(), &y.right_mul(&h).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn step_is_identity_at_zero_time() {
        let mut rng = seeded(5);
        let blocks = ModeBlocks::from_columns(&gaussian(&mut rng, 12, 3)).unwrap();
        let tan = HorizontalBlocks::new(&blocks, gaussian(&mut rng, 12, 3)).unwrap();
        for (x, t) in [(tan.clone(), 0.0), (HorizontalBlocks::zeros(&blocks).unwrap(), 1.0)] {
            let out = lowrank_geodesic_step(&blocks, &x, t, &mut FlopLedger::new()).unwrap();
            assert!((&out.blocks.columns() - &blocks.columns()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn step_matches_dense_exponential() {
        let mut rng = seeded(6);
        let (n, k) = (20, 2);
        for trial in 0..5 {
            let blocks = ModeBlocks::from_columns(&gaussian(&mut rng, n, k)).unwrap();
            let tan = HorizontalBlocks::new(&blocks, gaussian(&mut rng, n, k).scale(0.3)).unwrap();
            let t = 0.5 + trial as f64 * 0.4;
            let g = GroupElement::new(vec![blocks.densify()]).unwrap();
            let x = AlgebraElement::new(vec![tan.densify(&blocks)]).unwrap();
            let dense = gl_exp(&g, &x, t).unwrap().factors()[0].left_cols(k);
            let mut ledger = FlopLedger::new();
            let out = lowrank_geodesic_step(&blocks, &tan, t, &mut ledger).unwrap();
            let err = (&out.blocks.columns() - &dense).frobenius_norm() / dense.frobenius_norm();
            assert!(err < 1e-12, "trial {trial}: {err:e}");
            assert_eq!(ledger.steps().iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>(), STEP_NAMES);
        }
    }
}
