// SPDX-License-Identifier: Apache-2.0
//! Products and divisions that charge the [`FlopLedger`].

use crate::error::Result;
use crate::linalg::{FlopLedger, Lu, Matrix};

/// `a · b`, charged `2·rows(a)·cols(a)·cols(b)`.
pub fn mul(ledger: &mut FlopLedger, step: &str, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let out = a.try_matmul(b)?;
    ledger.charge_product(step, a.rows(), a.cols(), b.cols());
    Ok(out)
}

/// `aᵀ · b` without forming the transpose, charged as a product.
pub fn tmul(ledger: &mut FlopLedger, step: &str, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let at = a.transpose();
    ledger.charge_elementwise(a.rows() * a.cols());
    mul(ledger, step, &at, b)
}

/// `a \ b` (left division), charged `8·n²·cols(b)/3` for `n × n` `a`.
pub fn solve(ledger: &mut FlopLedger, step: &str, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let x = Lu::factor(a)?.solve(b)?;
    ledger.charge_division(step, a.rows(), b.cols());
    Ok(x)
}

/// `b / a = b·a⁻¹` (right division), charged `8·n²·rows(b)/3`.
pub fn solve_right(ledger: &mut FlopLedger, step: &str, b: &Matrix, a: &Matrix) -> Result<Matrix> {
    let x = Lu::factor(a)?.solve_transpose(&b.transpose())?.transpose();
    ledger.charge_division(step, a.rows(), b.rows());
    ledger.charge_elementwise(2 * b.rows() * b.cols());
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn charges_follow_the_model() {
        let mut l = FlopLedger::new();
        let a = Matrix::from_fn(3, 3, |i, j| if i == j { 2.0 } else { 0.5 });
        let b = Matrix::from_fn(5, 3, |i, j| (i * j) as f64);
        let x = solve_right(&mut l, "div", &b, &a).unwrap();
        assert!((&x.matmul(&a) - &b).max_abs() < 1e-13);
        assert_eq!(l.step("div"), Some(Ratio::new(8 * 9 * 5, 3)));
        let _ = mul(&mut l, "mul", &b, &a).unwrap();
        assert_eq!(l.step("mul"), Some(Ratio::from_integer(90)));
        let _ = tmul(&mut l, "tmul", &b, &b).unwrap();
        assert_eq!(l.step("tmul"), Some(Ratio::from_integer(90)));
    }
}
