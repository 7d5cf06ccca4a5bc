mod common;

use common::*;
use geodens::quantum::velocity_from_psi;
use geodens::spaces::{fubini_study_metric, sasaki_fr_metric};
use geodens::transforms::*;
use geodens::{ComplexField, Density, Error, ScalarField, ThetaFR};
use num_complex::Complex64;

#[test]
fn madelung_examples() {
    let g = grid1(64);
    let one = Density::uniform(&g);
    let psi = madelung(&one, &g.zeros(), 2.0).unwrap();
    assert!(psi.linf_distance(&g.constant(1.0).to_complex()) < 1e-15);
    let (rho, theta) = madelung_inverse(&psi, 2.0).unwrap();
    assert!(rho.linf_distance(&one) < 1e-15);
    assert!(theta.max_abs() < 1e-15);
}

#[test]
fn madelung_round_trip() {
    let mut r = rng(30);
    for g in [grid1(128), grid2(32)] {
        for hbar in [0.5, 1.0, 2.0] {
            let rho = random_density(&g, &mut r, 3, 0.6);
            let theta = random_field(&g, &mut r, 3, 2.0);
            let psi = madelung(&rho, &theta, hbar).unwrap();
            assert!(psi.abs_sq().linf_distance(&rho) < 1e-12);
            assert!(psi.values()[0].im.abs() < 1e-15 && psi.values()[0].re >= 0.0);
            let (rho2, theta2) = madelung_inverse(&psi, hbar).unwrap();
            assert!(rho2.linf_distance(&rho) < 1e-12);
            assert!(theta2.linf_distance(&theta.zero_mean()) < 1e-10);
        }
    }
}

#[test]
fn madelung_inverse_constructed_example() {
    let g = grid1(128);
    let hbar = 2.0;
    let psi = g.complex_from_fn(|x| {
        Complex64::from_polar((1.0 + 0.5 * x[0].cos()).sqrt(), x[0].sin() / hbar)
    });
    let psi = geodens::WaveFunction::new(psi).unwrap();
    let (rho, theta) = madelung_inverse(&psi, hbar).unwrap();
    assert!(rho.linf_distance(&g.from_fn(|x| 1.0 + 0.5 * x[0].cos())) < 1e-14);
    assert!(theta.linf_distance(&g.from_fn(|x| x[0].sin())) < 1e-12);
}

#[test]
fn madelung_inverse_rejects_winding_and_nodes() {
    let g = grid1(64);
    let wind = geodens::WaveFunction::new(g.complex_from_fn(|x| Complex64::from_polar(1.0, x[0])))
        .unwrap();
    assert!(matches!(
        madelung_inverse(&wind, 2.0),
        Err(Error::Winding { axis: 0, .. })
    ));
    let g2 = grid2(32);
    let wind2 =
        geodens::WaveFunction::new(g2.complex_from_fn(|x| Complex64::from_polar(1.0, 2.0 * x[1])))
            .unwrap();
    assert!(matches!(
        madelung_inverse(&wind2, 2.0),
        Err(Error::Winding { axis: 1, .. })
    ));
    let node = geodens::WaveFunction::normalized(g.from_fn(|x| x[0].cos()).to_complex()).unwrap();
    assert!(matches!(
        madelung_inverse(&node, 2.0),
        Err(Error::VanishingAmplitude(_))
    ));
}

#[test]
fn pushforward_examples_and_finite_differences() {
    let g = grid1(128);
    let one = Density::uniform(&g);
    let zero = g.zeros();
    assert_eq!(
        madelung_pushforward(&one, &zero, &zero, &zero, 2.0)
            .unwrap()
            .max_abs(),
        0.0
    );

    let mut r = rng(31);
    let rho = random_density(&g, &mut r, 3, 0.5);
    let a = random_field(&g, &mut r, 3, 0.3);
    let real = madelung_pushforward(&rho, &zero, &a, &zero, 2.0).unwrap();
    assert!(real.im().max_abs() < 1e-15);

    let theta = random_field(&g, &mut r, 3, 1.0);
    let b = random_field(&g, &mut r, 3, 1.0);
    for hbar in [0.5, 2.0] {
        // Gauge-free construction so that the derivative is not reprojected.
        let raw = |s: f64| -> ComplexField {
            let rr = rho.field() + &a.scale(s);
            let tt = &theta + &b.scale(s);
            ComplexField::from_polar(&rr.map(f64::sqrt), &tt.scale(1.0 / hbar)).unwrap()
        };
        let psi0 = madelung(&rho, &theta, hbar).unwrap();
        let base = ComplexField::from_polar(&rho.map(f64::sqrt), &theta.scale(1.0 / hbar)).unwrap();
        // Undo the gauge rotation applied by `madelung`.
        let rot = psi0.values()[0] / base.values()[0];
        let fd = |s: f64| (&raw(s) - &raw(-s)).scale(rot / (2.0 * s));
        let exact = madelung_pushforward(&rho, &theta, &a, &b, hbar).unwrap();
        let e1 = fd(1e-3).linf_distance(&exact);
        let e2 = fd(5e-4).linf_distance(&exact);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
        assert!(e2 < 1e-5);
    }
}

#[test]
fn symplectic_forms() {
    let g = grid1(64);
    let c = g.from_fn(|x| x[0].cos());
    let zero = g.zeros();
    // Sign convention: ω((ρ̇₁, θ̇₁), (ρ̇₂, θ̇₂)) = ∫ (θ̇₁ρ̇₂ − θ̇₂ρ̇₁).
    assert_close(
        canonical_symplectic((&c, &zero), (&zero, &c)).unwrap(),
        -0.5,
        1e-15,
        "canonical",
    );
    let mut r = rng(32);
    let rho = random_density(&g, &mut r, 3, 0.5);
    let theta = random_field(&g, &mut r, 3, 1.0);
    let t: Vec<ScalarField> = (0..4).map(|_| random_field(&g, &mut r, 3, 1.0)).collect();
    let w12 = canonical_symplectic((&t[0], &t[1]), (&t[2], &t[3])).unwrap();
    let w21 = canonical_symplectic((&t[2], &t[3]), (&t[0], &t[1])).unwrap();
    assert_eq!(w12, -w21);
    for hbar in [0.5, 1.0, 2.0] {
        let p1 = madelung_pushforward(&rho, &theta, &t[0].zero_mean(), &t[1], hbar).unwrap();
        let p2 = madelung_pushforward(&rho, &theta, &t[2].zero_mean(), &t[3], hbar).unwrap();
        let pulled = projective_symplectic(&p1, &p2, hbar).unwrap();
        let canonical =
            canonical_symplectic((&t[0].zero_mean(), &t[1]), (&t[2].zero_mean(), &t[3])).unwrap();
        assert!(rel_err(pulled, canonical) < 1e-10);
        assert_eq!(
            projective_symplectic(&p1, &p2, hbar).unwrap(),
            -projective_symplectic(&p2, &p1, hbar).unwrap()
        );
    }
}

#[test]
fn madelung_isometry_at_hbar_two() {
    let g = grid2(32);
    let mut r = rng(33);
    for _ in 0..10 {
        let rho = random_density(&g, &mut r, 3, 0.6);
        let theta = random_field(&g, &mut r, 3, 1.0);
        let mut tangent = || {
            let a = random_field(&g, &mut r, 3, 0.5);
            let b = ThetaFR::new(random_field(&g, &mut r, 3, 1.0), &rho)
                .unwrap()
                .into_field();
            (a, b)
        };
        let (a1, b1) = tangent();
        let (a2, b2) = tangent();
        let sasaki = sasaki_fr_metric(&rho, (&a1, &b1), (&a2, &b2)).unwrap();
        let psi = madelung(&rho, &theta, 2.0).unwrap();
        let p1 = madelung_pushforward(&rho, &theta, &a1, &b1, 2.0).unwrap();
        let p2 = madelung_pushforward(&rho, &theta, &a2, &b2, 2.0).unwrap();
        let fs = fubini_study_metric(&psi, &p1, &p2).unwrap();
        assert!(rel_err(sasaki, 4.0 * fs) < 1e-9, "{sasaki} vs {}", 4.0 * fs);
    }
}

#[test]
fn hopf_cole_examples() {
    let g = grid1(64);
    let (p, m) = hopf_cole(&g.constant(1.0), &g.zeros(), 0.7).unwrap();
    assert_eq!(p.linf_distance(&g.constant(1.0)), 0.0);
    assert_eq!(m.linf_distance(&g.constant(1.0)), 0.0);
    let mut r = rng(34);
    let rho = random_density(&g, &mut r, 3, 0.6);
    let theta = random_field(&g, &mut r, 3, 1.5);
    for gamma in [0.3, 1.0] {
        let (p, m) = hopf_cole(&rho, &theta, gamma).unwrap();
        let (rho2, theta2) = hopf_cole_inverse(&p, &m, gamma).unwrap();
        assert!(rho2.linf_distance(&rho) < 1e-12);
        assert!(theta2.linf_distance(&theta) < 1e-12);
    }
    let neg = g.from_fn(|x| x[0].cos());
    assert!(matches!(
        hopf_cole_inverse(&neg, &g.constant(1.0), 1.0),
        Err(Error::Positivity { .. })
    ));
    assert!(hopf_cole(&rho, &theta, 0.0).is_err());
}

#[test]
fn two_component_examples() {
    let g = grid1(64);
    let half = g.constant(0.5);
    let zero = g.zeros();
    let w = two_component_madelung((&half, &zero), (&half, &zero), 2.0).unwrap();
    let s = g.constant(0.5f64.sqrt()).to_complex();
    assert!(w.first().linf_distance(&s) < 1e-15 && w.second().linf_distance(&s) < 1e-15);

    let g = grid2(64);
    let mut r = rng(35);
    let frac = random_field(&g, &mut r, 2, 0.25).shift(0.5);
    let rho1 = frac.clone();
    let rho2 = frac.map(|f| 1.0 - f);
    let t1 = random_field(&g, &mut r, 2, 0.5);
    let t2 = random_field(&g, &mut r, 2, 0.5);
    for hbar in [0.5, 2.0] {
        let w = two_component_madelung((&rho1, &t1), (&rho2, &t2), hbar).unwrap();
        assert!(w.density().linf_distance(&g.constant(1.0)) < 1e-14);
        let v = velocity_from_psi(&w, hbar).unwrap();
        let expected = t1
            .gradient()
            .mul_scalar(&rho1)
            .axpy(1.0, &t2.gradient().mul_scalar(&rho2));
        assert!(
            v.linf_distance(&expected) < 1e-10,
            "{}",
            v.linf_distance(&expected)
        );
    }
}
