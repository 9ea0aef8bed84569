use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use htorsion::charclass::{verify_newton, BundleModel, RingSpec};
use htorsion::kamber_tondeur::{
    kt_cochain, kt_unitary_invariance_check, random_unitary, Catalog, MatrixFamily, QuadratureSpec,
};
use htorsion::polylog::{polylog_l, verify_distribution, RootOfUnity};
use htorsion::rational::q;
use htorsion::torsion::verify_lens_paths;
use htorsion::transfer::{double_cover_scenario, pullback, transfer_cochain, SimplicialCochain};
use htorsion::twisted::fixtures::random_solved_family;
use htorsion::twisted::total_complex;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(n)
    }
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn distribution_relation(k in 1u32..=5, m in 2u64..=5, n in 1u64..=6, j in 0i64..6) {
        let z = RootOfUnity::new(n, j % n as i64).unwrap();
        let r = verify_distribution(k, m, z, 1e-10).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn conjugation_flips_odd_k(k in 1u32..=5, n in 2u64..=8, j in 1i64..8) {
        let j = j % n as i64;
        let a = polylog_l(k, RootOfUnity::new(n, j).unwrap()).unwrap().value;
        let b = polylog_l(k, RootOfUnity::new(n, -j).unwrap()).unwrap().value;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        prop_assert!((a - sign * b).abs() < 1e-12, "{a} {b}");
    }

    #[test]
    fn newton_identity(k in 1u32..=5, nvars in 1usize..=5) {
        prop_assert!(verify_newton(k, nvars));
    }

    #[test]
    fn lens_torsion_agrees_with_chern_roots(rank in 1usize..=3, m in 2u64..=4, j in 1i64..4, k in 1u32..=3) {
        let z = RootOfUnity::new(m, j % m as i64).unwrap();
        let xi = BundleModel::split_from_generators(&RingSpec::roots(rank, "x", 2 * k)).unwrap();
        let r = verify_lens_paths(&xi, m, k, z, z.is_one(), 1e-12).unwrap();
        prop_assert!(r.pass);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn solved_families_square_to_zero(seed in any::<u64>(), k in 0usize..=3, pairs in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_solved_family(&mut rng, k, pairs);
        prop_assert!(fam.validate_twisted().pass);
        prop_assert!(total_complex(&fam).squares_to_zero());
    }

    #[test]
    fn transfer_of_pullback_is_degree_times(values in proptest::collection::vec(-20i64..=20, 30)) {
        let (cov, _) = double_cover_scenario(7, 2);
        for d in 0..=2 {
            let mut it = values.iter().cycle();
            let c = SimplicialCochain::from_fn(cov.base(), d, |_| q(*it.next().unwrap()));
            let back = transfer_cochain(&cov, &pullback(&cov, &c).unwrap()).unwrap();
            prop_assert_eq!(back, c.scale(&q(2)));
        }
    }

    #[test]
    fn coboundary_commutes_with_transfer(values in proptest::collection::vec(-20i64..=20, 40)) {
        let (cov, _) = double_cover_scenario(7, 2);
        for d in 0..2 {
            let mut it = values.iter().cycle();
            let c = SimplicialCochain::from_fn(cov.total(), d, |_| q(*it.next().unwrap()));
            let lhs = transfer_cochain(&cov, &c.coboundary(cov.total())).unwrap();
            let rhs = transfer_cochain(&cov, &c).unwrap().coboundary(cov.base());
            prop_assert_eq!(lhs, rhs);
        }
    }
}

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn kt_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let fam = MatrixFamily::catalog(1, Catalog::RandomSmooth { seed, n }).unwrap();
        let quad = QuadratureSpec::new(8, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let (u, v) = (random_unitary(&mut rng, n), random_unitary(&mut rng, n));
        prop_assert!(kt_unitary_invariance_check(&fam, &u, &v, &quad).unwrap().pass);
    }

    #[test]
    fn kt_changes_sign_under_transposition(seed in any::<u64>()) {
        let fam = MatrixFamily::catalog(1, Catalog::RandomSmooth { seed, n: 2 }).unwrap();
        let quad = QuadratureSpec::new(10, 1).unwrap();
        let a = kt_cochain(&fam, &quad).unwrap();
        let b = kt_cochain(&fam.reordered(&[0, 2, 1]).unwrap(), &quad).unwrap();
        prop_assert!((a.value + b.value).abs() < 1e-9 + 4.0 * a.estimated_error);
    }
}
