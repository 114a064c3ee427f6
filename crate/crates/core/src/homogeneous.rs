// SPDX-License-Identifier: Apache-2.0
//! Machinery shared by the CP, Tucker and TT manifolds.
//!
//! Each manifold is an orbit `G·T` of a reference tensor `T = C ×ᵢ Eᵢ`
//! with `Eᵢ = I_{nᵢ×kᵢ}` and a small core `C`. Its stabilizer algebra `𝔥`
//! consists of block upper triangular `Yᵢ = [Y₁₁ Y₁₂; 0 Y₂₂]` whose
//! top-left blocks lie in a manifold-specific subspace `𝔥₁₁`; the
//! horizontal space at the identity is `𝔪 = 𝔥^⊥ = {[L 0; X₂₁ 0] : L ∈ 𝔥₁₁^⊥}`.
//! At a group element `g` the horizontal space, right-trivialized, is
//! `g⁻ᵀ 𝔪 gᵀ`, so a horizontal tangent has leading columns
//! `A = g⁻ᵀ m (GᵀG)` for `m` the first block column of an element of `𝔪`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gl::{
    lowrank_geodesic_step_with_z, AlgebraElement, GroupElement, HorizontalBlocks, ModeBlocks,
};
use crate::linalg::{counted, inverse, orthonormal_complement, DenseTensor, FlopLedger, Lu, Matrix};
use crate::rng::{gaussian, seeded, TestRng};

/// What distinguishes the three manifolds.
pub trait HomogeneousShape: Clone + Debug + PartialEq {
    /// Short name used in files and reports.
    fn tag(&self) -> &'static str;
    fn dims(&self) -> &[usize];
    /// Number of leading columns `kᵢ` stored per mode.
    fn leading(&self) -> Vec<usize>;
    /// Core `C` of the reference tensor, of shape `k₁ × … × k_d`.
    fn reference_core(&self) -> DenseTensor;
    /// A basis of `𝔥₁₁`: each element lists one `kᵢ × kᵢ` block per mode.
    fn stabilizer_topleft_basis(&self) -> Vec<Vec<Matrix>>;
    /// Closed-form violation of the `𝔪` conditions by top-left blocks `Lᵢ`
    /// (zero exactly on `𝔥₁₁^⊥`).
    fn complement_residual(&self, blocks: &[Matrix]) -> f64;
    /// Random element of the stabilizer `H`. With `off_diagonal = false`
    /// the upper-right blocks are zero.
    fn sample_stabilizer(&self, rng: &mut TestRng, off_diagonal: bool) -> GroupElement;

    fn order(&self) -> usize {
        self.dims().len()
    }

    /// `T = C ×ᵢ I_{nᵢ×kᵢ}`.
    fn reference_tensor(&self) -> DenseTensor {
        let e: Vec<Matrix> =
            self.dims().iter().zip(self.leading()).map(|(&n, k)| Matrix::eye(n, k)).collect();
        self.reference_core().multilinear_product(&e).expect("consistent shape")
    }

    /// `true` when every `kᵢ = nᵢ`.
    fn is_square(&self) -> bool {
        self.dims().iter().zip(self.leading()).all(|(&n, k)| n == k)
    }

    /// `dim G − dim 𝔥`.
    fn manifold_dim(&self) -> usize {
        let q = self.stabilizer_topleft_basis().len();
        let dim_g: usize = self.dims().iter().map(|n| n * n).sum();
        let dim_h: usize = q + self.dims().iter().zip(self.leading()).map(|(&n, k)| n * (n - k)).sum::<usize>();
        dim_g - dim_h
    }
}

pub(crate) fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 3 || dims.iter().any(|&n| n < 2) {
        return Err(Error::InvalidShape(format!("{dims:?}: need d ≥ 3 modes of extent ≥ 2")));
    }
    Ok(())
}

fn flatten(blocks: &[Matrix]) -> Vec<f64> {
    blocks.iter().flat_map(|b| b.data().iter().copied()).collect()
}

fn unflatten(v: &[f64], ks: &[usize]) -> Vec<Matrix> {
    let mut off = 0;
    ks.iter()
        .map(|&k| {
            let m = Matrix::from_fn(k, k, |i, j| v[off + i * k + j]);
            off += k * k;
            m
        })
        .collect()
}

/// `𝔥₁₁` as columns of a matrix over the concatenated top-left blocks.
fn topleft_phi<S: HomogeneousShape>(shape: &S) -> Matrix {
    let basis = shape.stabilizer_topleft_basis();
    let dim: usize = shape.leading().iter().map(|k| k * k).sum();
    let mut phi = Matrix::zeros(dim, basis.len());
    for (c, b) in basis.iter().enumerate() {
        for (r, v) in flatten(b).into_iter().enumerate() {
            phi[(r, c)] = v;
        }
    }
    phi
}

/// Orthogonal projection of top-left blocks onto `𝔥₁₁^⊥`.
pub fn project_topleft<S: HomogeneousShape>(shape: &S, blocks: &[Matrix]) -> Vec<Matrix> {
    let phi = topleft_phi(shape);
    let x = Matrix::from_vec(phi.rows(), 1, flatten(blocks)).expect("finite blocks");
    if phi.cols() == 0 {
        return blocks.to_vec();
    }
    let gram = phi.transpose().matmul(&phi);
    let coef = Lu::factor(&gram).expect("independent basis").solve(&phi.transpose().matmul(&x)).expect("sizes");
    let proj = &x - &phi.matmul(&coef);
    unflatten(proj.data(), &shape.leading())
}

/// Orthonormal basis of `𝔥₁₁^⊥` (columns over the concatenated blocks).
fn complement_basis<S: HomogeneousShape>(shape: &S) -> Matrix {
    let phi = topleft_phi(shape);
    if phi.cols() == 0 {
        return Matrix::identity(phi.rows());
    }
    orthonormal_complement(&phi).expect("independent basis")
}

/// Orthogonal projection onto `𝔪` at the identity.
pub fn project_m<S: HomogeneousShape>(shape: &S, x: &AlgebraElement) -> Result<AlgebraElement> {
    check_profile(shape, x)?;
    let ks = shape.leading();
    let tl: Vec<Matrix> = x.factors().iter().zip(&ks).map(|(f, &k)| f.block(0, 0, k, k)).collect();
    let tl = project_topleft(shape, &tl);
    let factors = x
        .factors()
        .iter()
        .zip(ks.iter().zip(tl))
        .map(|(f, (&k, l))| {
            let n = f.rows();
            let mut m = Matrix::zeros(n, n);
            m.set_block(0, 0, &f.block(0, 0, n, k));
            m.set_block(0, 0, &l);
            m
        })
        .collect();
    AlgebraElement::new(factors)
}

/// Violation of the `𝔪` block pattern and top-left conditions.
pub fn m_residual<S: HomogeneousShape>(shape: &S, x: &AlgebraElement) -> Result<f64> {
    check_profile(shape, x)?;
    let ks = shape.leading();
    let mut pattern: f64 = 0.0;
    let mut tl = Vec::new();
    for (f, &k) in x.factors().iter().zip(&ks) {
        let n = f.rows();
        pattern = pattern.max(f.block(0, k, n, n - k).max_abs());
        tl.push(f.block(0, 0, k, k));
    }
    Ok(pattern.max(shape.complement_residual(&tl)))
}

/// Membership in `𝔪` within `tol·(1 + ‖x‖)`.
pub fn m_membership<S: HomogeneousShape>(shape: &S, x: &AlgebraElement, tol: f64) -> bool {
    m_residual(shape, x).is_ok_and(|r| r <= tol * (1.0 + x.norm()))
}

fn check_profile<S: HomogeneousShape>(shape: &S, x: &AlgebraElement) -> Result<()> {
    if x.dims() != shape.dims() {
        return Err(Error::DimensionMismatch(format!("element sized {:?} for dims {:?}", x.dims(), shape.dims())));
    }
    Ok(())
}

/// Least-squares horizontal part of the right-trivialized `z` at a dense `g`.
///
/// Returns the first block columns `mᵢ` of the element of `𝔪` and the
/// horizontal part `gᵢ⁻ᵀ[mᵢ 0]gᵢᵀ` itself.
fn horizontal_fit<S: HomogeneousShape>(
    shape: &S,
    g: &[Matrix],
    z: &[Matrix],
) -> Result<(Vec<Matrix>, Vec<Matrix>)> {
    let ks = shape.leading();
    let dims = shape.dims();
    let q2 = complement_basis(shape);
    let ginvt: Vec<Matrix> = g.iter().map(|gi| Ok(inverse(gi)?.transpose())).collect::<Result<_>>()?;
    let lead: Vec<Matrix> = g.iter().zip(&ks).map(|(gi, &k)| gi.left_cols(k)).collect();
    let rows: usize = dims.iter().map(|n| n * n).sum();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, n| {
        let o = *acc;
        *acc += n * n;
        Some(o)
    }).collect();
    let free: usize = dims.iter().zip(&ks).map(|(n, k)| (n - k) * k).sum();
    let p = q2.cols() + free;
    let mut v = DMatrix::<f64>::zeros(rows, p);
    let mut col = 0;
    for c in 0..q2.cols() {
        let blocks = unflatten(&q2.column(c), &ks);
        for i in 0..dims.len() {
            let k = ks[i];
            let img = ginvt[i].left_cols(k).matmul(&blocks[i]).matmul(&lead[i].transpose());
            for (r, &x) in img.data().iter().enumerate() {
                v[(offsets[i] + r, col)] = x;
            }
        }
        col += 1;
    }
    for i in 0..dims.len() {
        let (n, k) = (dims[i], ks[i]);
        for a in k..n {
            for b in 0..k {
                for r in 0..n {
                    let u = ginvt[i][(r, a)];
                    if u == 0.0 {
                        continue;
                    }
                    for s in 0..n {
                        v[(offsets[i] + r * n + s, col)] = u * lead[i][(s, b)];
                    }
                }
                col += 1;
            }
        }
    }
    let rhs = DVector::from_iterator(rows, z.iter().flat_map(|m| m.data().iter().copied()));
    let qr = v.clone().qr();
    let r = qr.r();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for j in 0..p {
        lo = lo.min(r[(j, j)].abs());
        hi = hi.max(r[(j, j)].abs());
    }
    if p > 0 && !(lo > 1e-13 * hi) {
        return Err(Error::IllConditioned(format!(
            "horizontal least squares, |R| diagonal range [{lo:e}, {hi:e}]"
        )));
    }
    let mut qtb = rhs;
    qr.q_tr_mul(&mut qtb);
    let theta = r
        .solve_upper_triangular(&qtb.rows(0, p).into_owned())
        .ok_or(Error::Singular("horizontal least squares"))?;

    let tl = {
        let coef = DVector::from_iterator(q2.cols(), theta.iter().take(q2.cols()).copied());
        let mut flat = vec![0.0; q2.rows()];
        for (c, &w) in coef.iter().enumerate() {
            for (r, f) in flat.iter_mut().enumerate() {
                *f += w * q2[(r, c)];
            }
        }
        unflatten(&flat, &ks)
    };
    let mut ms = Vec::with_capacity(dims.len());
    let mut idx = q2.cols();
    for i in 0..dims.len() {
        let (n, k) = (dims[i], ks[i]);
        let mut m = Matrix::zeros(n, k);
        m.set_block(0, 0, &tl[i]);
        for a in k..n {
            for b in 0..k {
                m[(a, b)] = theta[idx];
                idx += 1;
            }
        }
        ms.push(m);
    }
    let zh = ms
        .iter()
        .zip(ginvt.iter().zip(&lead))
        .map(|(m, (gt, gl))| gt.left_cols(m.rows()).matmul(m).matmul(&gl.transpose()))
        .collect();
    Ok((ms, zh))
}

/// Vertical part of a tangent `x` at an arbitrary dense `g` (not
/// necessarily a reduced representative), as a tangent at `g`.
pub fn vertical_component<S: HomogeneousShape>(
    shape: &S,
    g: &GroupElement,
    x: &AlgebraElement,
) -> Result<AlgebraElement> {
    check_profile(shape, x)?;
    let gi = g.inverse()?;
    let z = x.right_mul(&gi)?;
    let (_, zh) = horizontal_fit(shape, g.factors(), z.factors())?;
    let factors = z
        .factors()
        .iter()
        .zip(&zh)
        .zip(g.factors())
        .map(|((zi, hi), gf)| (zi - hi).matmul(gf))
        .collect();
    AlgebraElement::new(factors)
}

/// `‖Z_V‖/‖Z‖` for the right-trivialized `Z = x·g⁻¹` and its vertical part.
pub fn vertical_fraction<S: HomogeneousShape>(shape: &S, g: &GroupElement, x: &AlgebraElement) -> Result<f64> {
    let gi = g.inverse()?;
    let z = x.right_mul(&gi)?;
    let v = vertical_component(shape, g, x)?.right_mul(&gi)?;
    let nz = z.norm();
    Ok(if nz == 0.0 { 0.0 } else { v.norm() / nz })
}

/// A point `gH`, stored as one [`ModeBlocks`] per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<S> {
    shape: S,
    modes: Vec<ModeBlocks>,
}

/// A horizontal tangent at a [`Point`], one [`HorizontalBlocks`] per mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    modes: Vec<HorizontalBlocks>,
}

impl Tangent {
    pub fn from_modes(modes: Vec<HorizontalBlocks>) -> Self {
        Self { modes }
    }
    pub fn modes(&self) -> &[HorizontalBlocks] {
        &self.modes
    }
    pub fn scale(&self, s: f64) -> Self {
        Self { modes: self.modes.iter().map(|m| m.scale(s)).collect() }
    }
    /// Frobenius norm of the stored leading columns.
    pub fn coefficient_norm(&self) -> f64 {
        libm::sqrt(self.modes.iter().map(|m| m.first_cols().dot(m.first_cols())).sum())
    }
}

/// Ledger and scaling exponent of one mode's geodesic step.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeReport {
    pub n: usize,
    pub k: usize,
    pub z: u32,
    pub ledger: FlopLedger,
}

/// Per-mode accounting of a geodesic evaluation.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GeodesicReport {
    pub modes: Vec<ModeReport>,
}

impl GeodesicReport {
    pub fn zs(&self) -> Vec<u32> {
        self.modes.iter().map(|m| m.z).collect()
    }
    /// All per-mode ledgers merged in mode order.
    pub fn ledger(&self) -> FlopLedger {
        let mut l = FlopLedger::new();
        for m in &self.modes {
            l.merge(&m.ledger);
        }
        l
    }
}

impl<S: HomogeneousShape> Point<S> {
    pub fn from_modes(shape: S, modes: Vec<ModeBlocks>) -> Result<Self> {
        let ks = shape.leading();
        if modes.len() != shape.order()
            || modes.iter().zip(shape.dims()).zip(&ks).any(|((m, &n), &k)| m.n() != n || m.k() != k)
        {
            return Err(Error::DimensionMismatch(format!(
                "mode blocks do not fit dims {:?} with leading sizes {ks:?}",
                shape.dims()
            )));
        }
        Ok(Self { shape, modes })
    }

    /// The point whose representative has leading columns `cols[i]`
    /// (original row order).
    pub fn from_columns(shape: S, cols: &[Matrix]) -> Result<Self> {
        let modes = cols.iter().map(ModeBlocks::from_columns).collect::<Result<Vec<_>>>()?;
        Self::from_modes(shape, modes)
    }

    /// The coset of a dense group element.
    pub fn from_group_element(shape: S, g: &GroupElement) -> Result<Self> {
        if g.dims() != shape.dims() {
            return Err(Error::DimensionMismatch("group element profile".into()));
        }
        let cols: Vec<Matrix> =
            g.factors().iter().zip(shape.leading()).map(|(f, k)| f.left_cols(k)).collect();
        Self::from_columns(shape, &cols)
    }

    /// The coset of the identity.
    pub fn reference(shape: S) -> Self {
        let cols: Vec<Matrix> =
            shape.dims().iter().zip(shape.leading()).map(|(&n, k)| Matrix::eye(n, k)).collect();
        Self::from_columns(shape, &cols).expect("identity columns")
    }

    pub fn shape(&self) -> &S {
        &self.shape
    }
    pub fn modes(&self) -> &[ModeBlocks] {
        &self.modes
    }

    /// Point with independent Gaussian leading columns.
    pub fn random(shape: S, rng: &mut TestRng) -> Result<Self> {
        let cols: Vec<Matrix> =
            shape.dims().iter().zip(shape.leading()).map(|(&n, k)| gaussian(rng, n, k)).collect();
        Self::from_columns(shape, &cols)
    }

    /// Finite blocks and nonzero LU pivots in every `g₁₁`.
    pub fn leading_blocks_invertible(&self) -> bool {
        self.modes.iter().all(|m| m.frame().is_finite() && Lu::factor(&m.g11()).is_ok())
    }

    /// `g·T = C ×ᵢ (leading columns of gᵢ)`.
    pub fn embed(&self) -> DenseTensor {
        let cols: Vec<Matrix> = self.modes.iter().map(|m| m.columns()).collect();
        self.shape.reference_core().multilinear_product(&cols).expect("consistent shape")
    }

    /// Dense representative `gᵢ = Pᵢᵀ[g₁₁ 0; g₂₁ I]`. Test and oracle use only.
    pub fn group_element(&self) -> Result<GroupElement> {
        GroupElement::new(self.modes.iter().map(|m| m.densify()).collect())
    }

    /// Dense tangent factors at [`Point::group_element`]. Test and oracle use only.
    pub fn densify_tangent(&self, x: &Tangent) -> Result<AlgebraElement> {
        self.check_tangent(x)?;
        AlgebraElement::new(self.modes.iter().zip(&x.modes).map(|(b, h)| h.densify(b)).collect())
    }

    fn check_tangent(&self, x: &Tangent) -> Result<()> {
        if x.modes.len() != self.modes.len()
            || x.modes.iter().zip(&self.modes).any(|(h, b)| h.first_cols().shape() != b.frame().shape())
        {
            return Err(Error::DimensionMismatch("tangent does not match the point".into()));
        }
        Ok(())
    }

    /// Spanning set of the vertical space `g𝔥` at the dense representative,
    /// with exactly `dim 𝔥` elements.
    pub fn vertical_basis(&self) -> Result<Vec<AlgebraElement>> {
        let g = self.group_element()?;
        let dims = self.shape.dims().to_vec();
        let ks = self.shape.leading();
        let mut out = Vec::new();
        for tl in self.shape.stabilizer_topleft_basis() {
            let factors = tl
                .iter()
                .zip(&dims)
                .zip(g.factors())
                .map(|((b, &n), gi)| {
                    let mut y = Matrix::zeros(n, n);
                    y.set_block(0, 0, b);
                    gi.matmul(&y)
                })
                .collect();
            out.push(AlgebraElement::new(factors)?);
        }
        for i in 0..dims.len() {
            let (n, k) = (dims[i], ks[i]);
            for a in 0..n {
                for b in k..n {
                    let mut factors: Vec<Matrix> = dims.iter().map(|&m| Matrix::zeros(m, m)).collect();
                    // g·E_ab has column b equal to column a of g.
                    for r in 0..n {
                        factors[i][(r, b)] = g.factors()[i][(r, a)];
                    }
                    out.push(AlgebraElement::new(factors)?);
                }
            }
        }
        Ok(out)
    }

    /// Orthogonal projection (right-invariant metric) of a dense tangent at
    /// [`Point::group_element`] onto the horizontal space.
    pub fn project_horizontal(&self, z: &AlgebraElement) -> Result<Tangent> {
        check_profile(&self.shape, z)?;
        let g = self.group_element()?;
        let zr = z.right_mul(&g.inverse()?)?;
        let (ms, _) = horizontal_fit(&self.shape, g.factors(), zr.factors())?;
        let modes = self
            .modes
            .iter()
            .zip(ms)
            .zip(g.factors())
            .map(|((b, m), gi)| {
                let cols = gi.left_cols(b.k());
                let a = inverse(gi)?.transpose().matmul(&m).matmul(&cols.transpose().matmul(&cols));
                HorizontalBlocks::new(b, a.permute_rows(b.perm()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Tangent { modes })
    }

    /// `m₁₁⁽ⁱ⁾ = GᵢᵀAᵢ(GᵢᵀGᵢ)⁻¹` for each mode.
    fn topleft_coefficients(&self, x: &Tangent) -> Result<Vec<Matrix>> {
        self.modes
            .iter()
            .zip(&x.modes)
            .map(|(b, h)| {
                let g = b.frame();
                let gtg = g.transpose().matmul(g);
                let gta = g.transpose().matmul(h.first_cols());
                Ok(Lu::factor(&gtg)?.solve_transpose(&gta.transpose())?.transpose())
            })
            .collect()
    }

    /// Largest violation of the horizontal conditions: cached `Γ₁₂` against
    /// the point's, and the cross-mode `𝔪` conditions on `m₁₁`.
    pub fn horizontal_residual(&self, x: &Tangent) -> Result<f64> {
        self.check_tangent(x)?;
        let mut worst: f64 = 0.0;
        for (b, h) in self.modes.iter().zip(&x.modes) {
            let gamma = crate::gl::gamma12(b, &mut FlopLedger::new())?;
            let scale = 1.0 + h.first_cols().max_abs();
            worst = worst.max((&gamma - h.gamma12()).max_abs() * scale);
        }
        let m11 = self.topleft_coefficients(x)?;
        Ok(worst.max(self.shape.complement_residual(&m11)))
    }

    /// Whether all horizontal residuals are at most `tol·(1 + ‖x‖)`.
    pub fn is_horizontal(&self, x: &Tangent, tol: f64) -> bool {
        self.horizontal_residual(x).is_ok_and(|r| r <= tol * (1.0 + x.coefficient_norm()))
    }

    /// Random horizontal tangent, built in `O(nk²)` per mode.
    pub fn random_horizontal(&self, rng: &mut TestRng) -> Result<Tangent> {
        let ks = self.shape.leading();
        let tl: Vec<Matrix> = ks.iter().map(|&k| gaussian(rng, k, k)).collect();
        let tl = project_topleft(&self.shape, &tl);
        let mut scratch = FlopLedger::new();
        let modes = self
            .modes
            .iter()
            .zip(tl)
            .map(|(b, m11)| {
                let (n, k) = (b.n(), b.k());
                let m21 = gaussian(rng, n - k, k);
                let g11 = b.g11();
                // ĝ⁻ᵀ[m₁₁; m₂₁] = [g₁₁⁻ᵀ(m₁₁ − g₂₁ᵀm₂₁); m₂₁]
                let top = &m11 - &b.g21().transpose().matmul(&m21);
                let top = Lu::factor(&g11)?.solve_transpose(&top)?;
                let gtg = counted::tmul(&mut scratch, "", b.frame(), b.frame())?;
                let a = Matrix::vstack(&top, &m21).matmul(&gtg);
                HorizontalBlocks::new(b, a)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Tangent { modes })
    }

    /// Length in the canonical metric: `(Σᵢ‖AᵢBᵢ‖_F²)^{1/2}` with `Bᵢ = Gᵢ⁺`.
    pub fn tangent_norm(&self, x: &Tangent) -> Result<f64> {
        self.check_tangent(x)?;
        let mut s = 0.0;
        for (b, h) in self.modes.iter().zip(&x.modes) {
            let g = b.frame();
            let gtg = g.transpose().matmul(g);
            let a = h.first_cols();
            let ata = a.transpose().matmul(a);
            s += Lu::factor(&gtg)?.solve(&ata)?.trace();
        }
        Ok(libm::sqrt(s.max(0.0)))
    }

    /// Geodesic of the canonical metric at time `t`; charges `ledger`.
    pub fn geodesic(&self, x: &Tangent, t: f64, ledger: &mut FlopLedger) -> Result<Self> {
        let (p, report) = self.geodesic_report(x, t, None)?;
        ledger.merge(&report.ledger());
        Ok(p)
    }

    /// Geodesic with per-mode accounting; `zs` forces the scaling exponents.
    pub fn geodesic_report(&self, x: &Tangent, t: f64, zs: Option<&[u32]>) -> Result<(Self, GeodesicReport)> {
        self.check_tangent(x)?;
        if let Some(z) = zs {
            if z.len() != self.modes.len() {
                return Err(Error::DimensionMismatch(format!("{} scaling exponents for {} modes", z.len(), self.modes.len())));
            }
        }
        let mut report = GeodesicReport::default();
        let mut modes = Vec::with_capacity(self.modes.len());
        for (i, (b, h)) in self.modes.iter().zip(&x.modes).enumerate() {
            let mut ledger = FlopLedger::new();
            let out = lowrank_geodesic_step_with_z(b, h, t, zs.map(|z| z[i]), &mut ledger)?;
            report.modes.push(ModeReport { n: b.n(), k: b.k(), z: out.z, ledger });
            modes.push(out.blocks);
        }
        Ok((Self { shape: self.shape.clone(), modes }, report))
    }

    /// Moves to the representative `g·h` (reduced again) and carries `x`
    /// along by right translation, re-projected at the new representative.
    pub fn translate(&self, h: &GroupElement, x: &Tangent) -> Result<(Self, Tangent)> {
        let g = self.group_element()?;
        let gh = g.compose(h)?;
        let p2 = Self::from_group_element(self.shape.clone(), &gh)?;
        let g2 = p2.group_element()?;
        let xd = self.densify_tangent(x)?;
        // X·g⁻¹·g̃ keeps the right-trivialized velocity.
        let moved = xd.right_mul(&g.inverse()?)?.right_mul(&g2)?;
        let x2 = p2.project_horizontal(&moved)?;
        Ok((p2, x2))
    }
}

/// Result of an `Ad(H)`-invariance test of `𝔪`.
#[derive(Clone, Debug)]
pub struct ReductiveReport {
    /// Whether the shape is square (every `kᵢ = nᵢ`).
    pub square: bool,
    pub trials: usize,
    /// Largest `dist(Ad_h x, 𝔪)/‖x‖` over the sampled pairs.
    pub max_residual: f64,
    /// The pair attaining `max_residual`.
    pub witness: Option<(GroupElement, AlgebraElement)>,
}

/// Samples `(h, x) ∈ H × 𝔪` and measures how far `Ad_h x` leaves `𝔪`.
/// Square shapes sample `h` without off-diagonal blocks (there are none);
/// other shapes use full stabilizer samples.
pub fn reductive_check<S: HomogeneousShape>(shape: &S, trials: usize, seed: u64) -> Result<ReductiveReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let mut rng = seeded(seed);
    let square = shape.is_square();
    let mut best: Option<(f64, GroupElement, AlgebraElement)> = None;
    for _ in 0..trials {
        let h = shape.sample_stabilizer(&mut rng, !square);
        let raw = AlgebraElement::new(shape.dims().iter().map(|&n| gaussian(&mut rng, n, n)).collect())?;
        let x = project_m(shape, &raw)?;
        let res = ad_residual(shape, &h, &x)?;
        if best.as_ref().is_none_or(|(r, _, _)| res > *r) {
            best = Some((res, h, x));
        }
    }
    let (max_residual, h, x) = best.expect("at least one trial");
    Ok(ReductiveReport { square, trials, max_residual, witness: Some((h, x)) })
}

/// `dist(Ad_h x, 𝔪)/‖x‖`.
pub fn ad_residual<S: HomogeneousShape>(shape: &S, h: &GroupElement, x: &AlgebraElement) -> Result<f64> {
    let y = crate::gl::adjoint(h, x)?;
    let py = project_m(shape, &y)?;
    let nx = x.norm();
    Ok(if nx == 0.0 { 0.0 } else { y.axpy(-1.0, &py)?.norm() / nx })
}

/// Leading-terms cost of one geodesic: `Σᵢ 110nᵢkᵢ²/3 + (146 + 36zᵢ)kᵢ³`.
pub fn geodesic_flop_formula(dims: &[usize], leading: &[usize], zs: &[u32]) -> Ratio<i128> {
    dims.iter().zip(leading).zip(zs).fold(Ratio::from_integer(0), |acc, ((&n, &k), &z)| {
        let (n, k, z) = (n as i128, k as i128, z as i128);
        acc + Ratio::new(110 * n * k * k, 3) + Ratio::from_integer((146 + 36 * z) * k * k * k)
    })
}

/// Published per-step costs of one mode's geodesic step, keyed like the
/// ledger lines of [`crate::gl::lowrank_geodesic_step`] (valid for `z ≥ 1`).
pub fn published_step_costs(n: usize, k: usize, z: u32) -> Vec<(&'static str, Ratio<i128>)> {
    let (n, k, z) = (n as i128, k as i128, z as i128);
    let nk2 = n * k * k;
    let k3 = k * k * k;
    let psi = |m: i128| Ratio::new(52, 3) * m + Ratio::from_integer(4 * (z - 1) * m);
    vec![
        ("gamma12", Ratio::new(20 * nk2, 3) + Ratio::new(22 * k3, 3)),
        ("B", Ratio::from_integer(2 * nk2) + Ratio::new(8 * k3, 3)),
        ("BA", Ratio::from_integer(2 * nk2)),
        ("B'A'", Ratio::from_integer(8 * nk2)),
        ("psi1(BA)", psi(k3)),
        ("psi1(B'A')", psi(8 * k3)),
        ("term2", Ratio::from_integer(4 * nk2 + 2 * k3)),
        ("term3", Ratio::from_integer(8 * nk2 + 8 * k3)),
        ("term4", Ratio::from_integer(6 * nk2 + 6 * k3)),
    ]
}

/// Allowed gap `100·Σᵢ(nᵢkᵢ + kᵢ²)` between a ledger and the formula.
pub fn formula_slack(dims: &[usize], leading: &[usize]) -> Ratio<i128> {
    Ratio::from_integer(dims.iter().zip(leading).map(|(&n, &k)| 100 * (n * k + k * k) as i128).sum())
}

/// Rejects factors that are rank deficient or have condition number above `1e8`.
pub(crate) fn check_factor(m: &Matrix, what: &str) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite("factor matrix"));
    }
    if crate::linalg::numerical_rank(m, crate::linalg::RANK_TOL) < m.cols() {
        return Err(Error::RankDeficient(format!("{what} ({}×{})", m.rows(), m.cols())));
    }
    let c = crate::linalg::condition_number(m);
    if c > MAX_FACTOR_CONDITION {
        return Err(Error::IllConditioned(format!("{what}: condition number {c:e}")));
    }
    Ok(())
}

/// Largest accepted condition number of an input factor.
pub const MAX_FACTOR_CONDITION: f64 = 1e8;
