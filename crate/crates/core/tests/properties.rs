mod common;

use common::*;
use geodens::casimirs::helicity;
use geodens::potentials::{pressure, work_function};
use geodens::spaces::*;
use geodens::transforms::*;
use geodens::{ComplexField, Potential, StateFunction, ThetaFR, VectorField};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 32,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fr_metric_is_symmetric_and_nonnegative(seed in any::<u64>()) {
        let g = grid1(64);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 4, 0.7);
        let a = random_field(&g, &mut r, 4, 1.0);
        let b = random_field(&g, &mut r, 4, 1.0);
        prop_assert!(fr_metric(&rho, &a, &a).unwrap() >= 0.0);
        prop_assert_eq!(fr_metric(&rho, &a, &b).unwrap(), fr_metric(&rho, &b, &a).unwrap());
    }

    #[test]
    fn square_root_map_is_an_isometry_up_to_four(seed in any::<u64>()) {
        let g = grid2(16);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.7);
        let a = random_field(&g, &mut r, 3, 1.0);
        let b = random_field(&g, &mut r, 3, 1.0);
        let sphere = sqrt_map_differential(&rho, &a).unwrap().inner(&sqrt_map_differential(&rho, &b).unwrap());
        prop_assert!(rel_err(fr_metric(&rho, &a, &b).unwrap(), 4.0 * sphere) < 1e-10);
    }

    #[test]
    fn real_madelung_tangents_pull_back_fubini_study(seed in any::<u64>(), hbar in 0.3f64..3.0) {
        let g = grid1(64);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.6);
        let zero = g.zeros();
        let a = random_field(&g, &mut r, 3, 1.0);
        let psi = madelung(&rho, &zero, hbar).unwrap();
        let p = madelung_pushforward(&rho, &zero, &a, &zero, hbar).unwrap();
        let fs = fubini_study_metric(&psi, &p, &p).unwrap();
        prop_assert!(rel_err(fr_metric(&rho, &a, &a).unwrap(), 4.0 * fs) < 1e-10);
    }

    #[test]
    fn fr_distance_is_a_metric(seed in any::<u64>()) {
        let g = grid1(64);
        let mut r = rng(seed);
        let d: Vec<_> = (0..3).map(|_| random_density(&g, &mut r, 3, 0.8)).collect();
        let ab = fr_distance(&d[0], &d[1]).unwrap();
        prop_assert!((ab - fr_distance(&d[1], &d[0]).unwrap()).abs() < 1e-14);
        let via = fr_distance(&d[0], &d[2]).unwrap() + fr_distance(&d[2], &d[1]).unwrap();
        prop_assert!(ab <= via + 1e-12);
        prop_assert!(ab <= std::f64::consts::PI);
    }

    #[test]
    fn fr_geodesic_has_constant_speed(seed in any::<u64>(), t in 0.0f64..1.0) {
        let g = grid1(64);
        let mut r = rng(seed);
        let a = random_density(&g, &mut r, 3, 0.6);
        let b = random_density(&g, &mut r, 3, 0.6);
        let total = fr_distance(&a, &b).unwrap();
        let mid = fr_geodesic(&a, &b, t).unwrap();
        prop_assert!((fr_distance(&a, &mid).unwrap() - t * total).abs() < 1e-9);
        prop_assert!((mid.integrate() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn madelung_round_trip_and_modulus(seed in any::<u64>(), hbar in 0.3f64..3.0) {
        let g = grid2(32);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 2, 0.6);
        let theta = random_field(&g, &mut r, 2, 1.0);
        let psi = madelung(&rho, &theta, hbar).unwrap();
        prop_assert!(psi.abs_sq().linf_distance(&rho) < 1e-12);
        let (rho2, theta2) = madelung_inverse(&psi, hbar).unwrap();
        prop_assert!(rho2.linf_distance(&rho) < 1e-12);
        prop_assert!(theta2.linf_distance(&theta.zero_mean()) < 1e-10);
    }

    #[test]
    fn madelung_is_symplectic(seed in any::<u64>(), hbar in 0.3f64..3.0) {
        let g = grid1(64);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.6);
        let theta = random_field(&g, &mut r, 3, 1.0);
        let t: Vec<_> = (0..4).map(|_| random_field(&g, &mut r, 3, 1.0)).collect();
        let p1 = madelung_pushforward(&rho, &theta, &t[0], &t[1], hbar).unwrap();
        let p2 = madelung_pushforward(&rho, &theta, &t[2], &t[3], hbar).unwrap();
        let pulled = projective_symplectic(&p1, &p2, hbar).unwrap();
        let canonical = canonical_symplectic((&t[0], &t[1]), (&t[2], &t[3])).unwrap();
        prop_assert!((pulled - canonical).abs() < 1e-10 * canonical.abs().max(1.0));
    }

    #[test]
    fn madelung_is_an_isometry_at_hbar_two(seed in any::<u64>()) {
        let g = grid1(64);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.6);
        let theta = random_field(&g, &mut r, 3, 1.0);
        let a = random_field(&g, &mut r, 3, 0.5);
        let b = ThetaFR::new(random_field(&g, &mut r, 3, 1.0), &rho).unwrap().into_field();
        let psi = madelung(&rho, &theta, 2.0).unwrap();
        let p = madelung_pushforward(&rho, &theta, &a, &b, 2.0).unwrap();
        let fs = fubini_study_metric(&psi, &p, &p).unwrap();
        prop_assert!(rel_err(sasaki_fr_metric(&rho, (&a, &b), (&a, &b)).unwrap(), 4.0 * fs) < 1e-9);
    }

    #[test]
    fn fubini_study_ignores_phase_directions(seed in any::<u64>(), s in -2.0f64..2.0) {
        let g = grid1(32);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.6);
        let psi = madelung(&rho, &random_field(&g, &mut r, 3, 1.0), 2.0).unwrap();
        let a = ComplexField::from_parts(&random_field(&g, &mut r, 3, 1.0), &random_field(&g, &mut r, 3, 1.0)).unwrap();
        let shifted = &a + &psi.scale(num_complex::Complex64::new(0.0, s));
        let base = fubini_study_metric(&psi, &a, &a).unwrap();
        prop_assert!((fubini_study_metric(&psi, &shifted, &shifted).unwrap() - base).abs() < 1e-12 * base.max(1.0));
    }

    #[test]
    fn hopf_cole_round_trip(seed in any::<u64>(), gamma in 0.2f64..2.0) {
        let g = grid1(64);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.8);
        let theta = random_field(&g, &mut r, 3, 1.0);
        let (p, m) = hopf_cole(&rho, &theta, gamma).unwrap();
        prop_assert!((&p * &m).linf_distance(&rho) < 1e-12);
        let (rho2, theta2) = hopf_cole_inverse(&p, &m, gamma).unwrap();
        prop_assert!(rho2.linf_distance(&rho) < 1e-12);
        prop_assert!(theta2.linf_distance(&theta) < 1e-12);
    }

    #[test]
    fn weighted_poisson_inverts_the_operator(seed in any::<u64>()) {
        let g = grid2(32);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 2, 0.6);
        let rhs = random_field(&g, &mut r, 3, 1.0);
        let theta = weighted_poisson_solve(&rho, &rhs).unwrap();
        let lhs = theta.gradient().mul_scalar(&rho).divergence();
        prop_assert!(lhs.l2_distance(&rhs) < 1e-9 * rhs.norm_l2());
        prop_assert!(wo_metric(&rho, &rhs, &rhs).unwrap() > 0.0);
    }

    #[test]
    fn pressure_and_work_are_consistent(seed in any::<u64>(), exponent in 1.1f64..3.0) {
        let g = grid1(128);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 2, 0.5);
        let e = StateFunction::Polytropic { exponent };
        let lhs = pressure(&e, &rho).gradient();
        let rhs = work_function(&e, &rho).gradient().mul_scalar(&rho);
        prop_assert!(lhs.linf_distance(&rhs) < 1e-10);
    }

    #[test]
    fn directional_derivatives_match(seed in any::<u64>(), which in 0usize..6) {
        let g = grid1(128);
        let mut r = rng(seed);
        let rho = random_density(&g, &mut r, 3, 0.5);
        let a = random_field(&g, &mut r, 3, 0.2);
        let u = [
            Potential::Quadratic,
            Potential::Entropy,
            Potential::FisherInfo { scale: 1.0 },
            Potential::Gravity { constant: 1.0 },
            Potential::Barotropic(StateFunction::Polytropic { exponent: 1.5 }),
            Potential::Linear(random_field(&g, &mut r, 3, 1.0)),
        ][which].clone();
        let eps = 1e-4;
        let plus = geodens::Density::new(rho.field() + &a.scale(eps)).unwrap();
        let minus = geodens::Density::new(rho.field() - &a.scale(eps)).unwrap();
        let fd = (u.value(&plus).unwrap() - u.value(&minus).unwrap()) / (2.0 * eps);
        let exact = u.vder(&rho).unwrap().inner(&a);
        prop_assert!((fd - exact).abs() < 1e-7 * exact.abs().max(1.0));
    }

    #[test]
    fn helicity_ignores_exact_shifts(seed in any::<u64>()) {
        let g = grid3(16);
        let mut r = rng(seed);
        let v = VectorField::from_components((0..3).map(|_| random_field(&g, &mut r, 2, 1.0)).collect()).unwrap();
        let shifted = &v + &random_field(&g, &mut r, 2, 1.0).gradient();
        let h = helicity(&v).unwrap();
        prop_assert!((helicity(&shifted).unwrap() - h).abs() < 1e-10 * h.abs().max(1.0));
    }
}
