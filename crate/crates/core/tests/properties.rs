// SPDX-License-Identifier: Apache-2.0
use homtensor_core::cp::CpShape;
use homtensor_core::homogeneous::{m_membership, project_m, HomogeneousShape, Point};
use homtensor_core::gl::AlgebraElement;
use homtensor_core::linalg::{pivot_rows, Lu};
use homtensor_core::rng::{gaussian, seeded};
use homtensor_core::{Matrix, Permutation};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permutation_inverse_roundtrip(img in Just((0..9usize).collect::<Vec<_>>()).prop_shuffle()) {
        let p = Permutation::from_vec(img).unwrap();
        prop_assert!(p.then_after(&p.inverse()).is_identity());
        let m = Matrix::from_fn(9, 2, |i, j| (i * 2 + j) as f64);
        prop_assert_eq!(m.permute_rows(&p).unpermute_rows(&p), m);
    }

    #[test]
    fn pivot_block_is_nonsingular(seed in any::<u64>(), n in 3usize..12, k in 1usize..4) {
        let k = k.min(n);
        let g = gaussian(&mut seeded(seed), n, k);
        let (p, _) = pivot_rows(&g, 0.0).unwrap();
        let top = g.permute_rows(&p).top_rows(k);
        prop_assert!(Lu::factor(&top).is_ok());
    }

    #[test]
    fn cp_projection_lands_in_m(seed in any::<u64>(), r in 1usize..4) {
        let shape = CpShape::new(vec![4, 5, 4], r).unwrap();
        let mut rng = seeded(seed);
        let z = AlgebraElement::new(shape.dims().iter().map(|&n| gaussian(&mut rng, n, n)).collect()).unwrap();
        let x = project_m(&shape, &z).unwrap();
        prop_assert!(m_membership(&shape, &x, 1e-12));
        let again = project_m(&shape, &x).unwrap();
        prop_assert!(again.axpy(-1.0, &x).unwrap().norm() <= 1e-12 * (1.0 + x.norm()));
    }

    #[test]
    fn random_tangents_are_horizontal(seed in any::<u64>()) {
        let shape = CpShape::new(vec![5, 4, 6], 2).unwrap();
        let mut rng = seeded(seed);
        let p = Point::random(shape, &mut rng).unwrap();
        let x = p.random_horizontal(&mut rng).unwrap();
        prop_assert!(p.is_horizontal(&x, 1e-9));
    }
}
