// SPDX-License-Identifier: Apache-2.0
use homtensor_core::linalg::{FlopLedger, LowRankPair, Matrix};
use homtensor_core::oracle::{mexp_dense, psi1_scaled_series, psi1_series, OracleConfig};
use homtensor_core::psi::{inv_lowrank_update, mexp_lowrank, mexp_small, psi1, psi1_pade};
use homtensor_core::rng::{gaussian, seeded, uniform};

fn random_with_norm(rng: &mut homtensor_core::rng::TestRng, k: usize, norm: f64) -> Matrix {
    let g = gaussian(rng, k, k);
    g.scale(norm / g.frobenius_norm())
}

#[test]
fn pade_matches_series_on_the_half_ball() {
    let cfg = OracleConfig::default();
    let mut rng = seeded(11);
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        for _ in 0..200 {
            let norm = uniform(&mut rng, 0.0, 0.5);
            let m = random_with_norm(&mut rng, k, norm);
            let exact = psi1_series(&m, &cfg).unwrap().value;
            worst = worst.max((&psi1_pade(&m).unwrap() - &exact).frobenius_norm());
        }
    }
    assert!(worst <= 1e-15, "max deviation {worst:e}");
}

#[test]
fn scaled_psi1_against_extended_precision() {
    let cfg = OracleConfig::default();
    let mut rng = seeded(12);
    for _ in 0..20 {
        let m = random_with_norm(&mut rng, 6, 10.0);
        let exact = psi1_scaled_series(&m, &cfg).unwrap();
        let mut l = FlopLedger::new();
        let got = psi1(&m, &mut l).unwrap();
        let rel = (&got - &exact).frobenius_norm() / exact.frobenius_norm();
        assert!(rel <= 1e-13, "relative error {rel:e}");
    }
}

#[test]
fn psi1_defining_identity() {
    let mut rng = seeded(13);
    for k in [1, 3, 6] {
        for norm in [0.1, 1.0, 5.0, 20.0] {
            let m = random_with_norm(&mut rng, k, norm);
            let mut l = FlopLedger::new();
            let p = psi1(&m, &mut l).unwrap();
            let e = mexp_small(&m).unwrap();
            let mut lhs = m.matmul(&p);
            lhs.add_diagonal(1.0);
            let err = (&lhs - &e).frobenius_norm();
            assert!(err <= 1e-12 * (1.0 + e.frobenius_norm()), "k={k} norm={norm}: {err:e}");
        }
    }
}

#[test]
fn small_exponential_group_inverse() {
    let mut rng = seeded(14);
    let m = gaussian(&mut rng, 8, 8);
    let prod = mexp_small(&m).unwrap().matmul(&mexp_small(&m.scale(-1.0)).unwrap());
    assert!((&prod - &Matrix::identity(8)).max_abs() < 1e-13);
    let oracle = mexp_dense(&m).unwrap();
    let rel = (&mexp_small(&m).unwrap() - &oracle).frobenius_norm() / oracle.frobenius_norm();
    assert!(rel < 1e-13, "{rel:e}");
}

#[test]
fn lowrank_exponential_matches_dense() {
    let mut rng = seeded(15);
    for (n, k) in [(50, 3), (120, 1), (200, 10)] {
        let a = gaussian(&mut rng, n, k).scale(1.0 / (n as f64).sqrt());
        let b = gaussian(&mut rng, k, n).scale(1.0 / (n as f64).sqrt());
        let p = LowRankPair::new(a, b).unwrap();
        let mut l = FlopLedger::new();
        let got = mexp_lowrank(&p, &mut l).unwrap().densify();
        let oracle = mexp_dense(&p.densify()).unwrap();
        let rel = (&got - &oracle).frobenius_norm() / oracle.frobenius_norm();
        assert!(rel <= 1e-12, "n={n} k={k}: {rel:e}");
        assert_eq!(
            l.step("BA").unwrap(),
            num_rational::Ratio::from_integer(2 * (n * k * k) as i128)
        );
    }
}

#[test]
fn lowrank_inverse_defining_property() {
    let mut rng = seeded(16);
    let (n, k) = (40, 4);
    let a = gaussian(&mut rng, n, k).scale(0.2);
    let b = gaussian(&mut rng, k, n).scale(0.2);
    let p = LowRankPair::new(a, b).unwrap();
    let mut l = FlopLedger::new();
    let inv = inv_lowrank_update(&p, &mut l).unwrap().densify();
    let mut full = p.densify();
    full.add_diagonal(1.0);
    assert!((&full.matmul(&inv) - &Matrix::identity(n)).max_abs() < 1e-12);
    let zero = LowRankPair::new(Matrix::zeros(n, k), Matrix::zeros(k, n)).unwrap();
    assert_eq!(inv_lowrank_update(&zero, &mut l).unwrap().densify(), Matrix::identity(n));
    assert_eq!(mexp_lowrank(&zero, &mut l).unwrap().densify(), Matrix::identity(n));
}
