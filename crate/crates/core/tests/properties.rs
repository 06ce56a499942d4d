use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use isogroup::fixtures;
use isogroup::groupgen::{enumerate_ball, EnumerateOptions};
use isogroup::isomcore::{plane_rotation, Isometry};
use isogroup::obstruct::{classify, condition_11, exponent_condition, Verdict};

fn isometry_2d() -> impl Strategy<Value = Isometry> {
    (0.0..std::f64::consts::TAU, any::<bool>(), -5.0..5.0f64, -5.0..5.0f64).prop_map(|(t, flip, x, y)| {
        let mut ort = plane_rotation(2, 0, 1, t);
        if flip {
            ort *= DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        }
        Isometry::new(ort, DVector::from_vec(vec![x, y])).unwrap()
    })
}

proptest! {
    #[test]
    fn group_axioms(g in isometry_2d(), h in isometry_2d(), k in isometry_2d()) {
        let left = g.compose(&h).unwrap().compose(&k).unwrap();
        let right = g.compose(&h.compose(&k).unwrap()).unwrap();
        prop_assert!(left.distance(&right) < 1e-9);
        prop_assert!(g.compose(&g.inverse()).unwrap().is_identity(1e-9));
        prop_assert!(g.inverse().inverse().approx_eq(&g, 1e-9));
    }

    #[test]
    fn action_matches_composition(g in isometry_2d(), h in isometry_2d(), x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let p = DVector::from_vec(vec![x, y]);
        let lhs = g.compose(&h).unwrap().apply(&p);
        let rhs = g.apply(&h.apply(&p));
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn ball_counts_are_monotone(r1 in 1.0..12.0f64, dr in 0.0..6.0f64) {
        let spec = fixtures::glide_r2();
        let ball = enumerate_ball(&spec, r1 + dr, &EnumerateOptions::default()).unwrap();
        prop_assert!(ball.count_within(r1) <= ball.count_within(r1 + dr));
        let small = enumerate_ball(&spec, r1, &EnumerateOptions::default()).unwrap();
        prop_assert_eq!(small.len(), ball.count_within(r1));
    }

    #[test]
    fn classifier_conditions_agree(n in 3i64..40, k_frac in 0.0..1.0f64, l_frac in 0.0..=1.0f64) {
        let k = 1 + ((n - 3) as f64 * k_frac).round() as i64;
        let l = (k as f64 * l_frac).round() as i64;
        prop_assert_eq!(condition_11(n, k, l).unwrap(), exponent_condition(n, k, l).unwrap());
        let verdict = classify(n, k, l).verdict;
        prop_assert!(verdict != Verdict::InvalidInput);
    }

    #[test]
    fn classifier_rejects_out_of_range(n in 1i64..30, k in -5i64..40, l in -5i64..40) {
        let valid = (0..=n).contains(&k) && (0..=k).contains(&l) && (k <= n - 2 || l == k);
        prop_assert_eq!(classify(n, k, l).verdict == Verdict::InvalidInput, !valid);
    }
}
