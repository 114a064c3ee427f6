// SPDX-License-Identifier: Apache-2.0
//! `ψ₁(x) = (eˣ − 1)/x` and the exponential of small and low-rank matrices.
//!
//! Both functions use degree-(6,6) Padé quotients on `2^{-z}M` with
//! `‖2^{-z}M‖_F ≤ 1/2`, sharing the powers `X², …, X⁶`. `ψ₁` is rebuilt by
//! `ψ₁(2Y) = ψ₁(Y)(e^Y + 1)/2`, the exponential by repeated squaring.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{counted, FlopLedger, LowRankPair, Matrix};

// Padé denominators q(X) and the differences p(X) − q(X) of the numerators;
// the quotient is formed as I + q(X)⁻¹(p(X) − q(X)), which keeps the O(1)
// part exact instead of recovering it from a cancelling division.
const PSI_DEN: [f64; 7] = [
    1.0,
    -6.0 / 13.0,
    5.0 / 52.0,
    -5.0 / 429.0,
    1.0 / 1144.0,
    -1.0 / 25740.0,
    1.0 / 1235520.0,
];
const PSI_DIFF: [f64; 7] =
    [0.0, 0.5, -5.0 / 78.0, 1.0 / 78.0, -1.0 / 1430.0, 1.0 / 22880.0, -1.0 / 1441440.0];
const EXP_DEN: [f64; 7] =
    [1.0, -0.5, 5.0 / 44.0, -1.0 / 66.0, 1.0 / 792.0, -1.0 / 15840.0, 1.0 / 665280.0];
const EXP_DIFF: [f64; 7] = [0.0, 1.0, 0.0, 1.0 / 33.0, 0.0, 1.0 / 7920.0, 0.0];

/// Largest Frobenius norm handed to a Padé quotient.
pub const PADE_RADIUS: f64 = 0.5;

/// Scaling exponent for a given input norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingPlan {
    pub z: u32,
    pub norm_used: f64,
}

/// `z = max(0, ⌈log₂ norm⌉ + 2)`, and `z = 0` whenever `norm ≤ 1/2`.
pub fn make_scaling_plan(norm: f64) -> ScalingPlan {
    let z = if norm > PADE_RADIUS && norm.is_finite() {
        let (mant, exp) = libm::frexp(norm);
        let ceil_log2 = if mant == 0.5 { exp - 1 } else { exp };
        (ceil_log2 + 2).max(0) as u32
    } else {
        0
    };
    ScalingPlan { z, norm_used: norm }
}

impl ScalingPlan {
    /// The larger of two plans (same `z` for several calls).
    pub fn max(self, other: ScalingPlan) -> ScalingPlan {
        if other.z > self.z {
            other
        } else {
            self
        }
    }
}

fn check_square(m: &Matrix, what: &'static str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{what} needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

/// `[I, X, X², …, X⁶]`; five charged products.
fn powers(x: &Matrix, ledger: &mut FlopLedger, step: &str) -> Result<Vec<Matrix>> {
    let mut p = Vec::with_capacity(7);
    p.push(Matrix::identity(x.rows()));
    p.push(x.clone());
    for j in 2..=6 {
        let next = counted::mul(ledger, step, &p[j - 1], x)?;
        p.push(next);
    }
    Ok(p)
}

fn rational(
    p: &[Matrix],
    den: &[f64; 7],
    diff: &[f64; 7],
    ledger: &mut FlopLedger,
    step: &str,
) -> Result<Matrix> {
    let k = p[0].rows();
    let mut d = Matrix::zeros(k, k);
    let mut nd = Matrix::zeros(k, k);
    for j in 0..7 {
        d.axpy(den[j], &p[j]);
        if diff[j] != 0.0 {
            nd.axpy(diff[j], &p[j]);
        }
    }
    ledger.charge_elementwise(4 * 7 * k * k);
    let mut r = counted::solve(ledger, step, &d, &nd)?;
    r.add_diagonal(1.0);
    Ok(r)
}

/// The (6,6) Padé approximant of `ψ₁(m)`; needs `‖m‖_F ≤ 1/2`.
pub fn psi1_pade(m: &Matrix) -> Result<Matrix> {
    check_square(m, "psi1_pade")?;
    let norm = m.frobenius_norm();
    if norm > PADE_RADIUS {
        return Err(Error::NormTooLarge { norm, bound: PADE_RADIUS });
    }
    let mut scratch = FlopLedger::new();
    let p = powers(m, &mut scratch, "psi1")?;
    rational(&p, &PSI_DEN, &PSI_DIFF, &mut scratch, "psi1")
}

/// `ψ₁(m)` for any finite `m`, charged to the step `"psi1"`.
pub fn psi1(m: &Matrix, ledger: &mut FlopLedger) -> Result<Matrix> {
    check_square(m, "psi1")?;
    let plan = make_scaling_plan(m.frobenius_norm());
    psi1_with_plan(m, plan, ledger, "psi1")
}

/// `ψ₁(m)` with a caller-chosen exponent `plan.z`, which must bring the
/// Frobenius norm of `2^{-z}m` to at most `1/2`.
///
/// Charges, on `step`: `10k³` for the powers, `8k³/3` per Padé quotient
/// (one for `z = 0`, two otherwise), `2(z−1)k³` for the squarings and
/// `2zk³` for the products with `mexp(2^{-j}m) + I`.
pub fn psi1_with_plan(
    m: &Matrix,
    plan: ScalingPlan,
    ledger: &mut FlopLedger,
    step: &str,
) -> Result<Matrix> {
    check_square(m, "psi1")?;
    let factor = libm::ldexp(1.0, -(plan.z as i32));
    let x = m.scale(factor);
    let norm = x.frobenius_norm();
    if norm > PADE_RADIUS {
        return Err(Error::NormTooLarge { norm, bound: PADE_RADIUS });
    }
    ledger.charge_elementwise(m.rows() * m.cols());
    let p = powers(&x, ledger, step)?;
    let mut r = rational(&p, &PSI_DEN, &PSI_DIFF, ledger, step)?;
    if plan.z == 0 {
        return Ok(r);
    }
    let mut e = rational(&p, &EXP_DEN, &EXP_DIFF, ledger, step)?;
    for j in (1..=plan.z).rev() {
        let mut e1 = e.clone();
        e1.add_diagonal(1.0);
        r = counted::mul(ledger, step, &r, &e1)?;
        if j > 1 {
            e = counted::mul(ledger, step, &e, &e)?;
        }
    }
    ledger.charge_elementwise(m.rows() * m.cols() * (plan.z as usize + 1));
    Ok(r.scale(factor))
}

/// Matrix exponential of a small dense matrix (Padé with scaling and squaring).
pub fn mexp_small(m: &Matrix) -> Result<Matrix> {
    check_square(m, "mexp_small")?;
    let plan = make_scaling_plan(m.frobenius_norm());
    let x = m.scale(libm::ldexp(1.0, -(plan.z as i32)));
    let mut scratch = FlopLedger::new();
    let p = powers(&x, &mut scratch, "mexp")?;
    let mut e = rational(&p, &EXP_DEN, &EXP_DIFF, &mut scratch, "mexp")?;
    for _ in 0..plan.z {
        e = e.matmul(&e);
    }
    if !e.is_finite() {
        return Err(Error::NonFinite("mexp_small result"));
    }
    Ok(e)
}

/// `I + left · core · right`, with `left`, `right` taken from `pair`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankUpdate {
    pub core: Matrix,
    pub pair: LowRankPair,
}

impl LowRankUpdate {
    /// Forms the `n × n` matrix. Test and oracle use only.
    pub fn densify(&self) -> Matrix {
        let mut m = self.pair.left().matmul(&self.core).matmul(self.pair.right());
        m.add_diagonal(1.0);
        m
    }

    /// `(I + left·core·right) · x` for an `n × m` block, in `O(nkm)`.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        let t = self.pair.right().try_matmul(x)?;
        let t = self.core.matmul(&t);
        let mut out = self.pair.left().matmul(&t);
        out.axpy(1.0, x);
        Ok(out)
    }
}

/// `mexp(AB) = I + A ψ₁(BA) B`; charges `"BA"` and `"psi1"`.
pub fn mexp_lowrank(p: &LowRankPair, ledger: &mut FlopLedger) -> Result<LowRankUpdate> {
    let ba = counted::mul(ledger, "BA", p.right(), p.left())?;
    let core = psi1(&ba, ledger)?;
    Ok(LowRankUpdate { core, pair: p.clone() })
}

/// `(I + AB)⁻¹ = I − A (I + BA)⁻¹ B`; the returned core is `−(I + BA)⁻¹`.
pub fn inv_lowrank_update(p: &LowRankPair, ledger: &mut FlopLedger) -> Result<LowRankUpdate> {
    let mut s = counted::mul(ledger, "BA", p.right(), p.left())?;
    s.add_diagonal(1.0);
    let inv = counted::solve(ledger, "inverse", &s, &Matrix::identity(p.k()))
        .map_err(|_| Error::Singular("I + BA in the low-rank inverse"))?;
    Ok(LowRankUpdate { core: inv.scale(-1.0), pair: p.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn plans() {
        assert_eq!(make_scaling_plan(3.0).z, 4);
        assert_eq!(make_scaling_plan(0.3).z, 0);
        assert_eq!(make_scaling_plan(0.5).z, 0);
        // ⌈log₂ 0.6⌉ + 2 = 2.
        assert_eq!(make_scaling_plan(0.6).z, 2);
        assert_eq!(make_scaling_plan(1.0).z, 2);
        assert_eq!(make_scaling_plan(4.0).z, 4);
        assert_eq!(make_scaling_plan(4.000001).z, 5);
        assert_eq!(make_scaling_plan(0.0).z, 0);
        for &x in &[0.51, 0.75, 1.0, 1.5, 3.0, 7.9, 8.0, 1e3, 12345.6] {
            let p = make_scaling_plan(x);
            assert!(libm::ldexp(x, -(p.z as i32)) <= 0.25, "{x}");
        }
    }

    #[test]
    fn scalar_values() {
        let h = psi1_pade(&Matrix::from_rows(&[&[0.5]])).unwrap();
        assert!((h[(0, 0)] - 1.2974425414002564).abs() < 2e-16);
        let mut l = FlopLedger::new();
        let two = psi1(&Matrix::from_rows(&[&[2.0]]), &mut l).unwrap();
        assert!((two[(0, 0)] - 3.194528049465325).abs() < 1e-14);
        let e = mexp_small(&Matrix::from_rows(&[&[1.0]])).unwrap();
        assert!((e[(0, 0)] - core::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn zero_gives_identity() {
        let z = Matrix::zeros(3, 3);
        assert_eq!(psi1_pade(&z).unwrap(), Matrix::identity(3));
        assert_eq!(mexp_small(&z).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn pade_rejects_large_input() {
        let m = Matrix::from_rows(&[&[0.6]]);
        assert!(matches!(psi1_pade(&m), Err(Error::NormTooLarge { .. })));
    }

    #[test]
    fn psi1_ledger_matches_the_itemized_count() {
        for (x, z) in [(3.0, 4u32), (0.6, 2), (1.5, 3)] {
            let k = 4usize;
            let m = Matrix::from_fn(k, k, |i, j| if i == j { x / 2.0 } else { 0.0 });
            let plan = make_scaling_plan(m.frobenius_norm());
            assert_eq!(plan.z, z);
            let mut l = FlopLedger::new();
            psi1(&m, &mut l).unwrap();
            let k3 = (k * k * k) as i128;
            let expect = Ratio::new(52, 3) * k3 + Ratio::from_integer(4 * (z as i128 - 1) * k3);
            assert_eq!(l.total(), expect);
        }
    }

    #[test]
    fn lowrank_inverse_scalar() {
        let n = 4;
        let c = 0.75;
        let a = Matrix::eye(n, 1);
        let b = Matrix::eye(1, n).scale(c);
        let p = LowRankPair::new(a, b).unwrap();
        let mut l = FlopLedger::new();
        let u = inv_lowrank_update(&p, &mut l).unwrap();
        assert!((u.core[(0, 0)] + 1.0 / (1.0 + c)).abs() < 1e-15);
        let d = u.densify();
        assert!((d[(0, 0)] - (1.0 - c / (1.0 + c))).abs() < 1e-15);
    }

    #[test]
    fn lowrank_exp_rank_one() {
        let n = 5;
        let s = 1.7;
        let p = LowRankPair::new(Matrix::eye(n, 1).scale(s), Matrix::eye(1, n)).unwrap();
        let mut l = FlopLedger::new();
        let d = mexp_lowrank(&p, &mut l).unwrap().densify();
        let mut expect = Matrix::identity(n);
        expect[(0, 0)] += libm::exp(s) - 1.0;
        assert!((&d - &expect).max_abs() < 1e-14);
        assert_eq!(l.step("BA"), Some(Ratio::from_integer(2 * n as i128)));
    }
}
