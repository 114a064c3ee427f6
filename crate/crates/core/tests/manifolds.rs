// SPDX-License-Identifier: Apache-2.0
//! Geometry of the three manifolds checked against dense computations.

use homtensor_core::cp::CpShape;
use homtensor_core::gl::{mode_apply, AlgebraElement, GroupElement};
use homtensor_core::homogeneous::{
    formula_slack, geodesic_flop_formula, published_step_costs, vertical_fraction, HomogeneousShape, Point, Tangent,
};
use homtensor_core::linalg::{tt_rank, DenseTensor};
use homtensor_core::oracle::dense_geodesic;
use homtensor_core::rng::{gaussian, seeded, TestRng};
use homtensor_core::tt::TtShape;
use homtensor_core::tucker::TuckerShape;
use homtensor_core::FlopLedger;

fn cp() -> CpShape {
    CpShape::new(vec![20, 20, 20], 3).unwrap()
}
fn tucker() -> TuckerShape {
    TuckerShape::new(vec![6, 4, 4], vec![4, 2, 2]).unwrap()
}
fn tt() -> TtShape {
    TtShape::new(vec![10, 20, 10], vec![2, 3]).unwrap()
}

fn unit_tangent<S: HomogeneousShape>(p: &Point<S>, rng: &mut TestRng) -> Tangent {
    let x = p.random_horizontal(rng).unwrap();
    x.scale(1.0 / p.tangent_norm(&x).unwrap())
}

fn dense_embed<S: HomogeneousShape>(p: &Point<S>, x: &Tangent, t: f64) -> DenseTensor {
    let g = p.group_element().unwrap();
    let xd = p.densify_tangent(x).unwrap();
    let path = GroupElement::new(dense_geodesic(g.factors(), xd.factors(), t).unwrap()).unwrap();
    mode_apply(&path, &p.shape().reference_tensor()).unwrap()
}

fn rel(a: &DenseTensor, b: &DenseTensor) -> f64 {
    a.distance(b).unwrap() / b.frobenius_norm()
}

fn check_oracle<S: HomogeneousShape>(shape: S, seed: u64) {
    let mut rng = seeded(seed);
    for _ in 0..3 {
        let p = Point::random(shape.clone(), &mut rng).unwrap();
        let x = unit_tangent(&p, &mut rng);
        assert!(p.is_horizontal(&x, 1e-9));
        let q = p.geodesic(&x, 0.0, &mut FlopLedger::new()).unwrap();
        assert!(rel(&q.embed(), &p.embed()) <= 1e-13);
        for t in [0.5, 1.0, 2.0] {
            let q = p.geodesic(&x, t, &mut FlopLedger::new()).unwrap();
            let err = rel(&q.embed(), &dense_embed(&p, &x, t));
            assert!(err <= 1e-10, "{} t={t}: {err:e}", shape.tag());
        }
    }
}

#[test]
fn geodesics_match_dense_oracle() {
    check_oracle(cp(), 1);
    check_oracle(tucker(), 2);
    check_oracle(tt(), 3);
}

fn check_projection<S: HomogeneousShape>(shape: S, seed: u64) {
    let mut rng = seeded(seed);
    let p = Point::random(shape.clone(), &mut rng).unwrap();
    let vb = p.vertical_basis().unwrap();
    // Vertical input projects to zero.
    let mut v = AlgebraElement::zeros(shape.dims());
    for b in vb.iter().take(7) {
        v = v.axpy(gaussian(&mut rng, 1, 1)[(0, 0)], b).unwrap();
    }
    assert!(p.project_horizontal(&v).unwrap().coefficient_norm() <= 1e-10 * (1.0 + v.norm()));
    // Idempotence.
    let x = p.random_horizontal(&mut rng).unwrap();
    let back = p.project_horizontal(&p.densify_tangent(&x).unwrap()).unwrap();
    for (a, b) in back.modes().iter().zip(x.modes()) {
        assert!((a.first_cols() - b.first_cols()).max_abs() <= 1e-10 * (1.0 + x.coefficient_norm()));
    }
    // The residual of a generic projection is vertical.
    let z = AlgebraElement::new(shape.dims().iter().map(|&n| gaussian(&mut rng, n, n)).collect()).unwrap();
    let h = p.project_horizontal(&z).unwrap();
    assert!(p.is_horizontal(&h, 1e-9));
    let g = p.group_element().unwrap();
    let resid = z.axpy(-1.0, &p.densify_tangent(&h).unwrap()).unwrap();
    assert!(vertical_fraction(&shape, &g, &resid).unwrap() >= 1.0 - 1e-10);
}

#[test]
fn horizontal_projection() {
    check_projection(CpShape::new(vec![5, 6, 4], 2).unwrap(), 4);
    check_projection(tucker(), 5);
    check_projection(TtShape::new(vec![3, 5, 3], vec![2, 2]).unwrap(), 6);
}

fn check_vertical_fd<S: HomogeneousShape>(shape: S, seed: u64) {
    let mut rng = seeded(seed);
    let p = Point::random(shape.clone(), &mut rng).unwrap();
    let g = p.group_element().unwrap();
    let tref = shape.reference_tensor();
    let h = 1e-6;
    let scale = p.embed().frobenius_norm();
    for v in p.vertical_basis().unwrap().iter().step_by(5) {
        let shifted = |s: f64| {
            let f = g.factors().iter().zip(v.factors()).map(|(a, b)| {
                let mut m = a.clone();
                m.axpy(s, b);
                m
            });
            mode_apply(&GroupElement::new(f.collect()).unwrap(), &tref).unwrap()
        };
        let d = shifted(h).distance(&shifted(-h)).unwrap() / (2.0 * h);
        assert!(d <= 1e-6 * scale, "{}: {d:e}", shape.tag());
    }
}

#[test]
fn vertical_directions_leave_embedding_fixed() {
    check_vertical_fd(CpShape::new(vec![4, 4, 4], 2).unwrap(), 7);
    check_vertical_fd(tucker(), 8);
    check_vertical_fd(TtShape::new(vec![3, 5, 3], vec![2, 2]).unwrap(), 9);
}

fn check_translation<S: HomogeneousShape>(shape: S, seed: u64) {
    let mut rng = seeded(seed);
    for _ in 0..3 {
        let p = Point::random(shape.clone(), &mut rng).unwrap();
        let x = unit_tangent(&p, &mut rng);
        let h = shape.sample_stabilizer(&mut rng, true);
        let (p2, x2) = p.translate(&h, &x).unwrap();
        assert!(rel(&p2.embed(), &p.embed()) <= 1e-12);
        for t in [0.5, 1.0] {
            let a = p.geodesic(&x, t, &mut FlopLedger::new()).unwrap().embed();
            let b = p2.geodesic(&x2, t, &mut FlopLedger::new()).unwrap().embed();
            assert!(rel(&b, &a) <= 1e-8, "{}: {:e}", shape.tag(), rel(&b, &a));
        }
    }
}

#[test]
fn representative_independence() {
    check_translation(CpShape::new(vec![6, 5, 7], 3).unwrap(), 10);
    check_translation(tucker(), 11);
    check_translation(TtShape::new(vec![3, 6, 4], vec![2, 3]).unwrap(), 12);
}

fn check_horizontal_path<S: HomogeneousShape>(shape: S, seed: u64) {
    let mut rng = seeded(seed);
    let p = Point::random(shape.clone(), &mut rng).unwrap();
    let x = unit_tangent(&p, &mut rng);
    let g = p.group_element().unwrap();
    let xd = p.densify_tangent(&x).unwrap();
    let path = |t: f64| GroupElement::new(dense_geodesic(g.factors(), xd.factors(), t).unwrap()).unwrap();
    let h = 1e-6;
    for t in [0.25, 0.5, 1.0] {
        let (a, b) = (path(t + h), path(t - h));
        let vel = AlgebraElement::new(
            a.factors().iter().zip(b.factors()).map(|(u, v)| (u - v).scale(0.5 / h)).collect(),
        )
        .unwrap();
        let f = vertical_fraction(&shape, &path(t), &vel).unwrap();
        assert!(f <= 1e-5, "{} t={t}: {f:e}", shape.tag());
    }
}

#[test]
fn geodesics_stay_horizontal() {
    check_horizontal_path(CpShape::new(vec![6, 5, 7], 2).unwrap(), 13);
    check_horizontal_path(tucker(), 14);
    check_horizontal_path(TtShape::new(vec![3, 6, 4], vec![2, 3]).unwrap(), 15);
}

#[test]
fn initial_velocity_is_pushforward() {
    let mut rng = seeded(16);
    let p = Point::random(tt(), &mut rng).unwrap();
    let x = unit_tangent(&p, &mut rng);
    let h = 1e-6;
    let at = |t: f64| p.geodesic(&x, t, &mut FlopLedger::new()).unwrap().embed();
    let fd = at(h).add(&at(-h).scale(-1.0)).unwrap().scale(0.5 / h);
    let g = p.group_element().unwrap();
    let xd = p.densify_tangent(&x).unwrap();
    let tref = tt().reference_tensor();
    let moved = |s: f64| {
        let f = g.factors().iter().zip(xd.factors()).map(|(a, b)| {
            let mut m = a.clone();
            m.axpy(s, b);
            m
        });
        mode_apply(&GroupElement::new(f.collect()).unwrap(), &tref).unwrap()
    };
    let push = moved(h).add(&moved(-h).scale(-1.0)).unwrap().scale(0.5 / h);
    assert!(rel(&fd, &push) <= 1e-5);
}

#[test]
fn long_geodesics_stay_valid() {
    let mut rng = seeded(17);
    let p = Point::random(tt(), &mut rng).unwrap();
    let x = unit_tangent(&p, &mut rng);
    for t in [0.5, 1.0, 5.0] {
        let q = p.geodesic(&x, t, &mut FlopLedger::new()).unwrap();
        assert_eq!(tt_rank(&q.embed(), 1e-9), [2, 3]);
    }
    for shape_seed in 0..3 {
        let p = Point::random(cp(), &mut rng).unwrap();
        let x = unit_tangent(&p, &mut rng);
        let q = p.geodesic(&x, 50.0 + shape_seed as f64, &mut FlopLedger::new()).unwrap();
        assert!(q.leading_blocks_invertible());
    }
}

#[test]
fn ledger_tracks_formula() {
    let mut rng = seeded(18);
    let shape = CpShape::new(vec![60, 40, 50], 4).unwrap();
    let p = Point::random(shape.clone(), &mut rng).unwrap();
    let x = unit_tangent(&p, &mut rng);
    let (_, report) = p.geodesic_report(&x, 3.0, None).unwrap();
    let zs = report.zs();
    let formula = geodesic_flop_formula(shape.dims(), &shape.leading(), &zs);
    let diff = report.ledger().total() - formula;
    let gap = if diff < 0.into() { -diff } else { diff };
    assert!(gap <= formula_slack(shape.dims(), &shape.leading()));
    // Lines outside the frame pseudo-inverse and the fourth term agree item by item.
    for m in &report.modes {
        for (name, cost) in published_step_costs(m.n, m.k, m.z) {
            if !matches!(name, "gamma12" | "B" | "term4") {
                assert_eq!(m.ledger.step(name), Some(cost), "{name}");
            }
        }
    }
}

#[test]
fn forced_exponent_is_respected() {
    let mut rng = seeded(19);
    let p = Point::random(cp(), &mut rng).unwrap();
    let x = unit_tangent(&p, &mut rng).scale(0.1);
    let (_, report) = p.geodesic_report(&x, 1.0, Some(&[3, 3, 3])).unwrap();
    assert_eq!(report.zs(), [3, 3, 3]);
    assert!(p.geodesic_report(&x.scale(1e3), 1.0, Some(&[0, 0, 0])).is_err());
}
